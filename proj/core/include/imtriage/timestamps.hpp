#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace imtriage {

enum class TimeUnit { Seconds, Milliseconds };

std::string_view to_string(TimeUnit unit) noexcept;

struct UtcTimestamp {
  std::int64_t raw = 0;
  TimeUnit unit = TimeUnit::Seconds;
  // Values below 10^9 (before September 2001 when read as seconds) are kept
  // but marked; they usually mean a wrong column or a zeroed field.
  bool implausible = false;
  std::string iso;

  std::int64_t epoch_ms() const { return unit == TimeUnit::Milliseconds ? raw : raw * 1000; }

  friend bool operator==(const UtcTimestamp&, const UtcTimestamp&) = default;
};

inline constexpr std::int64_t kMillisThreshold = 1'000'000'000'000;  // 10^12
inline constexpr std::int64_t kPlausibleSeconds = 1'000'000'000;     // 10^9

// raw >= 10^12 is milliseconds since the Unix epoch, smaller values are
// seconds; anything under 10^9 is flagged implausible. Never throws.
UtcTimestamp normalize_timestamp(std::int64_t raw);

// Interprets raw in a caller-chosen unit (used when a unit is configured).
UtcTimestamp timestamp_in_unit(std::int64_t raw, TimeUnit unit);

// "YYYY-MM-DDTHH:MM:SSZ", or with ".mmm" when the millisecond part is nonzero.
std::string format_iso8601(std::int64_t epoch_ms);

// Inverse of format_iso8601. Returns milliseconds since the epoch.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

}  // namespace imtriage
