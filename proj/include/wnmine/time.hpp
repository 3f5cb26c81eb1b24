#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wnmine {

/// UTC instant with millisecond resolution.
using TimePoint = std::chrono::sys_time<std::chrono::milliseconds>;

struct TimestampError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t k = 0; k < count; ++k) {
    char c = s[pos + k];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += count;
  out = value;
  return true;
}

inline bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

}  // namespace detail

/// Parses `YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+HH:MM|-HH:MM|+HHMM]` and normalizes to UTC.
/// Fractions beyond milliseconds are truncated. A timestamp without an offset is
/// rejected unless `default_offset` is supplied.
inline TimePoint parse_timestamp(std::string_view text,
                                 std::optional<std::chrono::minutes> default_offset = std::nullopt) {
  using namespace std::chrono;
  auto fail = [&](const char* why) {
    throw TimestampError("malformed timestamp '" + std::string(text) + "': " + why);
  };

  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::read_digits(text, pos, 4, y) || !detail::expect(text, pos, '-') ||
      !detail::read_digits(text, pos, 2, mo) || !detail::expect(text, pos, '-') ||
      !detail::read_digits(text, pos, 2, d)) {
    fail("expected YYYY-MM-DD");
  }
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) fail("expected 'T'");
  ++pos;
  if (!detail::read_digits(text, pos, 2, h) || !detail::expect(text, pos, ':') ||
      !detail::read_digits(text, pos, 2, mi) || !detail::expect(text, pos, ':') ||
      !detail::read_digits(text, pos, 2, sec)) {
    fail("expected HH:MM:SS");
  }

  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) fail("empty fraction");
    for (std::size_t k = digits; k < 3; ++k) millis *= 10;
  }

  std::optional<minutes> offset;
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z' || c == 'z') {
      offset = minutes{0};
      ++pos;
    } else if (c == '+' || c == '-') {
      ++pos;
      int oh = 0, om = 0;
      if (!detail::read_digits(text, pos, 2, oh)) fail("bad offset hours");
      if (pos < text.size() && text[pos] == ':') ++pos;
      if (!detail::read_digits(text, pos, 2, om)) fail("bad offset minutes");
      if (oh > 23 || om > 59) fail("offset out of range");
      offset = minutes{(c == '-' ? -1 : 1) * (oh * 60 + om)};
    } else {
      fail("unexpected trailing characters");
    }
  }
  if (pos != text.size()) fail("unexpected trailing characters");
  if (!offset) {
    if (!default_offset) fail("missing UTC offset");
    offset = default_offset;
  }

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) fail("invalid calendar date");
  if (h > 23 || mi > 59 || sec > 59) fail("time of day out of range");

  TimePoint local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{millis};
  return local - *offset;
}

/// Formats as `YYYY-MM-DDTHH:MM:SS[.fff]+00:00`; the fraction is omitted when zero.
inline std::string format_timestamp(TimePoint tp) {
  using namespace std::chrono;
  auto day_point = floor<days>(tp);
  year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> tod{tp - day_point};
  char buf[64];
  auto ms = tod.subseconds().count();
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d+00:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), static_cast<int>(ms));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d+00:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  }
  return buf;
}

/// Seconds between two instants as a real number.
inline double seconds_between(TimePoint from, TimePoint to) {
  return std::chrono::duration<double>(to - from).count();
}

}  // namespace wnmine
