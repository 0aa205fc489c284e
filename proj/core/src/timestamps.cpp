#include "imtriage/timestamps.hpp"

#include <chrono>
#include <cstdio>

namespace imtriage {

std::string_view to_string(TimeUnit unit) noexcept {
  return unit == TimeUnit::Seconds ? "seconds" : "milliseconds";
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

std::string format_iso8601(std::int64_t epoch_ms) {
  using namespace std::chrono;
  const std::int64_t day = floor_div(epoch_ms, 86'400'000);
  const std::int64_t ms_of_day = epoch_ms - day * 86'400'000;
  const year_month_day ymd{sys_days{days{day}}};
  const auto secs = ms_of_day / 1000;
  const auto millis = ms_of_day % 1000;
  char buf[48];
  if (millis == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                  static_cast<int>(secs % 60));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(secs / 3600),
                  static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60),
                  static_cast<int>(millis));
  }
  return buf;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int h = 0;
  int mi = 0;
  int s = 0;
  int ms = 0;
  int consumed = 0;
  const std::string str(text);
  if (std::sscanf(str.c_str(), "%d-%u-%uT%d:%d:%d%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6) {
    return std::nullopt;
  }
  std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest.front() == '.') {
    if (rest.size() < 4) return std::nullopt;
    for (int i = 1; i <= 3; ++i) {
      const char c = rest[static_cast<std::size_t>(i)];
      if (c < '0' || c > '9') return std::nullopt;
      ms = ms * 10 + (c - '0');
    }
    rest.remove_prefix(4);
  }
  if (rest != "Z") return std::nullopt;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) return std::nullopt;
  const std::int64_t days_since = sys_days{ymd}.time_since_epoch().count();
  return ((days_since * 24 + h) * 60 + mi) * 60'000 + std::int64_t{s} * 1000 + ms;
}

UtcTimestamp timestamp_in_unit(std::int64_t raw, TimeUnit unit) {
  UtcTimestamp t;
  t.raw = raw;
  t.unit = unit;
  const std::int64_t seconds = unit == TimeUnit::Milliseconds ? floor_div(raw, 1000) : raw;
  t.implausible = seconds < kPlausibleSeconds;
  t.iso = format_iso8601(t.epoch_ms());
  return t;
}

UtcTimestamp normalize_timestamp(std::int64_t raw) {
  return timestamp_in_unit(raw, raw >= kMillisThreshold ? TimeUnit::Milliseconds
                                                        : TimeUnit::Seconds);
}

}  // namespace imtriage
