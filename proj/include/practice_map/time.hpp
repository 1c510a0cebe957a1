#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "practice_map/csv.hpp"

namespace practice_map {

// UTC instant at one-second precision.
using Instant = std::chrono::sys_seconds;

namespace detail {

inline bool take_digits(std::string_view& s, std::size_t n, int& out) {
  if (s.size() < n) return false;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  s.remove_prefix(n);
  return true;
}

inline bool take_char(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) return false;
  s.remove_prefix(1);
  return true;
}

}  // namespace detail

// Accepts UNIX seconds ("1700000000") or ISO-8601 ("2023-05-01",
// "2023-05-01T12:30:00Z", "2023-05-01 12:30:00+10:00", fractional seconds
// truncated). A missing offset means UTC.
inline std::optional<Instant> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  text = csv::trim(text);
  if (text.empty()) return std::nullopt;

  if (auto secs = parse_int<std::int64_t>(text)) return Instant{seconds{*secs}};

  std::string_view s = text;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (!detail::take_digits(s, 4, y) || !detail::take_char(s, '-') ||
      !detail::take_digits(s, 2, mo) || !detail::take_char(s, '-') ||
      !detail::take_digits(s, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  long offset = 0;
  if (!s.empty()) {
    if (!detail::take_char(s, 'T') && !detail::take_char(s, ' ')) return std::nullopt;
    if (!detail::take_digits(s, 2, h) || !detail::take_char(s, ':') ||
        !detail::take_digits(s, 2, mi)) {
      return std::nullopt;
    }
    if (detail::take_char(s, ':') && !detail::take_digits(s, 2, se)) return std::nullopt;
    if (h > 23 || mi > 59 || se > 60) return std::nullopt;
    if (detail::take_char(s, '.')) {
      std::size_t n = 0;
      while (n < s.size() && s[n] >= '0' && s[n] <= '9') ++n;
      if (n == 0) return std::nullopt;
      s.remove_prefix(n);
    }
    if (detail::take_char(s, 'Z')) {
    } else if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
      const int sign = s.front() == '-' ? -1 : 1;
      s.remove_prefix(1);
      int oh = 0, om = 0;
      if (!detail::take_digits(s, 2, oh)) return std::nullopt;
      detail::take_char(s, ':');
      if (!s.empty() && !detail::take_digits(s, 2, om)) return std::nullopt;
      offset = sign * (oh * 3600L + om * 60L);
    }
    if (!s.empty()) return std::nullopt;
  }
  return Instant{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{se} - seconds{offset};
}

inline std::string format_timestamp(Instant t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss<seconds> hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

// Start of the bin containing t. Bins are anchored at Monday 1970-01-05
// 00:00 UTC, so one-week bins are ISO weeks.
inline Instant bin_start(Instant t, std::chrono::seconds width) {
  using namespace std::chrono;
  constexpr seconds anchor{4 * 86400};
  const std::int64_t w = width.count();
  std::int64_t rel = (t.time_since_epoch() - anchor).count();
  std::int64_t q = rel / w;
  if (rel % w < 0) --q;
  return Instant{anchor + seconds{q * w}};
}

}  // namespace practice_map
