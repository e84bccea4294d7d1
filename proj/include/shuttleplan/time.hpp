#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace shuttleplan {

// Wall-clock instant, seconds since 1970-01-01T00:00:00 (naive local time,
// no zone handling). Trip records carry minute precision.
struct Timestamp {
  std::int64_t seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr double kSecondsPerDay = 86400.0;

// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (a space may replace the 'T').
// Throws FormatError on anything else.
Timestamp parse_iso_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SS".
std::string format_iso_timestamp(Timestamp t);

// Seconds since local midnight, in [0, 86400).
double time_of_day_s(Timestamp t);

// Parses "HH:MM[:SS]" to seconds since midnight. Hours may exceed 23 for
// service times past midnight.
double parse_time_of_day(std::string_view text);

// "HH:MM:SS", rounded to the nearest second.
std::string format_time_of_day(double seconds);

// "HH:MM" when the value is a whole minute, else "HH:MM:SS".
std::string format_time_of_day_short(double seconds);

}  // namespace shuttleplan
