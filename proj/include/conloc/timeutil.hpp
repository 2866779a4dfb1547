#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace conloc::timeutil {

// Seconds since 1970-01-01T00:00:00Z.
using EpochSeconds = int64_t;

inline constexpr int64_t kSecondsPerDay = 86400;

struct CivilDateTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
};

struct YearMonth {
  int year = 1970;
  int month = 1;
  auto operator<=>(const YearMonth&) const = default;
};

// Days since 1970-01-01 for a proleptic Gregorian civil date.
int64_t days_from_civil(int year, int month, int day);
void civil_from_days(int64_t days, int& year, int& month, int& day);

CivilDateTime civil_from_epoch(EpochSeconds t);
EpochSeconds epoch_from_civil(const CivilDateTime& c);

// 0 = Sunday .. 6 = Saturday.
int weekday_of_day(int64_t days_since_epoch);

int days_in_month(int year, int month);

// Accepts YYYY-MM-DD{T or space}HH:MM:SS with optional fractional seconds
// (ignored) and optional Z or +-HH[:MM] offset; the result is normalized to
// UTC. Returns nullopt on any malformed or out-of-range component.
std::optional<EpochSeconds> parse_iso8601(std::string_view s);

// YYYY-MM-DDTHH:MM:SSZ
std::string format_iso8601(EpochSeconds t);

YearMonth year_month_of(EpochSeconds t);
EpochSeconds month_start_epoch(YearMonth ym);
YearMonth add_months(YearMonth ym, int n);

std::string format_year_month(YearMonth ym);
std::optional<YearMonth> parse_year_month(std::string_view s);

// Calendar day bucket, shifted by a per-unit offset from UTC.
inline int64_t day_index(EpochSeconds t, int32_t utc_offset_s) {
  int64_t shifted = t + utc_offset_s;
  int64_t d = shifted / kSecondsPerDay;
  if (shifted % kSecondsPerDay < 0) --d;
  return d;
}

}  // namespace conloc::timeutil
