#include "shuttleplan/time.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

// Proleptic Gregorian day count (H. Hinnant's civil calendar algorithms).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

// Reads exactly `width` digits at `pos`.
bool read_fixed(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  const char* first = s.data() + pos;
  const char* last = first + width;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw FormatError("invalid timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_iso_timestamp(std::string_view text) {
  std::string_view s = text;
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (s.size() != 16 && s.size() != 19) bad_timestamp(text);
  if (!read_fixed(s, 0, 4, year) || s[4] != '-' || !read_fixed(s, 5, 2, month) || s[7] != '-' ||
      !read_fixed(s, 8, 2, day) || (s[10] != 'T' && s[10] != ' ') || !read_fixed(s, 11, 2, hour) ||
      s[13] != ':' || !read_fixed(s, 14, 2, minute)) {
    bad_timestamp(text);
  }
  if (s.size() == 19 && (s[16] != ':' || !read_fixed(s, 17, 2, second))) bad_timestamp(text);
  if (month < 1 || month > 12 || day < 1 ||
      day > static_cast<int>(days_in_month(year, static_cast<unsigned>(month))) || hour > 23 ||
      minute > 59 || second > 59) {
    bad_timestamp(text);
  }
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return Timestamp{days * 86400 + hour * 3600 + minute * 60 + second};
}

std::string format_iso_timestamp(Timestamp t) {
  std::int64_t days = t.seconds / 86400;
  std::int64_t rem = t.seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld", static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

double time_of_day_s(Timestamp t) {
  std::int64_t rem = t.seconds % 86400;
  if (rem < 0) rem += 86400;
  return static_cast<double>(rem);
}

double parse_time_of_day(std::string_view text) {
  int hour = 0, minute = 0, second = 0;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 2) {
    throw FormatError("invalid time of day '" + std::string(text) + "'");
  }
  const std::size_t rest = text.size() - colon - 1;
  if (!read_fixed(text, 0, colon, hour) || !read_fixed(text, colon + 1, 2, minute) ||
      (rest != 2 && rest != 5) || (rest == 5 && (text[colon + 3] != ':' || !read_fixed(text, colon + 4, 2, second))) ||
      minute > 59 || second > 59) {
    throw FormatError("invalid time of day '" + std::string(text) + "'");
  }
  return hour * 3600.0 + minute * 60.0 + second;
}

std::string format_time_of_day(double seconds) {
  const auto total = static_cast<long long>(std::llround(seconds));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", total / 3600, total / 60 % 60, total % 60);
  return buf;
}

std::string format_time_of_day_short(double seconds) {
  if (seconds == std::floor(seconds) && static_cast<long long>(seconds) % 60 == 0) {
    const auto total = static_cast<long long>(seconds);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld", total / 3600, total / 60 % 60);
    return buf;
  }
  return format_time_of_day(seconds);
}

}  // namespace shuttleplan
