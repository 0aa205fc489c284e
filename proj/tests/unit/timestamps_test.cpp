#include "imtriage/timestamps.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace imtriage;

TEST_CASE("ISO-8601 rendering against calendar reference values") {
  // Reference strings computed with an independent calendar library.
  const std::vector<std::pair<std::int64_t, std::string>> cases = {
      {0, "1970-01-01T00:00:00Z"},
      {999999999000, "2001-09-09T01:46:39Z"},
      {1000000000000, "2001-09-09T01:46:40Z"},
      {1551450568863, "2019-03-01T14:29:28.863Z"},
      {1552564800000, "2019-03-14T12:00:00Z"},
      {951782400000, "2000-02-29T00:00:00Z"},
      {4102444800000, "2100-01-01T00:00:00Z"},
      {-1, "1969-12-31T23:59:59.999Z"},
      {253402300799999, "9999-12-31T23:59:59.999Z"},
  };
  for (const auto& [ms, iso] : cases) {
    CHECK(format_iso8601(ms) == iso);
    CHECK(parse_iso8601(iso) == ms);
  }
}

TEST_CASE("Unit heuristic splits at 10^12") {
  const auto ms = normalize_timestamp(1551450568863);
  CHECK(ms.unit == TimeUnit::Milliseconds);
  CHECK(ms.epoch_ms() == 1551450568863);
  CHECK(ms.iso == "2019-03-01T14:29:28.863Z");
  CHECK_FALSE(ms.implausible);

  const auto s = normalize_timestamp(1551450568);
  CHECK(s.unit == TimeUnit::Seconds);
  CHECK(s.epoch_ms() == 1551450568000);
  CHECK(s.iso == "2019-03-01T14:29:28Z");

  CHECK(normalize_timestamp(kMillisThreshold).unit == TimeUnit::Milliseconds);
  CHECK(normalize_timestamp(kMillisThreshold - 1).unit == TimeUnit::Seconds);
}

TEST_CASE("Values below 10^9 are kept but flagged") {
  for (std::int64_t raw : {std::int64_t{0}, std::int64_t{1}, std::int64_t{999999999},
                           std::int64_t{-5}}) {
    const auto t = normalize_timestamp(raw);
    CHECK(t.implausible);
    CHECK(t.raw == raw);
    CHECK(t.unit == TimeUnit::Seconds);
  }
  CHECK_FALSE(normalize_timestamp(kPlausibleSeconds).implausible);
}

TEST_CASE("Configured unit overrides the heuristic") {
  const auto t = timestamp_in_unit(1551450568, TimeUnit::Milliseconds);
  CHECK(t.unit == TimeUnit::Milliseconds);
  CHECK(t.epoch_ms() == 1551450568);
  CHECK(timestamp_in_unit(1551450568, TimeUnit::Seconds) == normalize_timestamp(1551450568));
}

TEST_CASE("parse_iso8601 inverts format_iso8601") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> dist(-2'000'000'000'000, 4'000'000'000'000);
  for (int i = 0; i < 5000; ++i) {
    const auto ms = dist(rng);
    CHECK(parse_iso8601(format_iso8601(ms)) == ms);
  }
  CHECK_FALSE(parse_iso8601("2019-13-01T00:00:00Z"));
  CHECK_FALSE(parse_iso8601("yesterday"));
  CHECK_FALSE(parse_iso8601("2019-03-01T00:00:00"));
}
