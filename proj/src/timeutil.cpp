#include "conloc/timeutil.hpp"

#include <charconv>
#include <cstdio>

namespace conloc::timeutil {

int64_t days_from_civil(int year, int month, int day) {
  year -= month <= 2;
  const int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t days, int& year, int& month, int& day) {
  days += 719468;
  const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  year = static_cast<int>(y + (month <= 2));
}

CivilDateTime civil_from_epoch(EpochSeconds t) {
  int64_t d = t / kSecondsPerDay;
  int64_t rem = t % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --d;
  }
  CivilDateTime c;
  civil_from_days(d, c.year, c.month, c.day);
  c.hour = static_cast<int>(rem / 3600);
  c.minute = static_cast<int>((rem / 60) % 60);
  c.second = static_cast<int>(rem % 60);
  return c;
}

EpochSeconds epoch_from_civil(const CivilDateTime& c) {
  return days_from_civil(c.year, c.month, c.day) * kSecondsPerDay +
         c.hour * 3600 + c.minute * 60 + c.second;
}

int weekday_of_day(int64_t days_since_epoch) {
  return static_cast<int>(((days_since_epoch + 4) % 7 + 7) % 7);
}

int days_in_month(int year, int month) {
  static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[month - 1];
}

namespace {

bool parse_int(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc() && p == s.data() + pos + len;
}

}  // namespace

std::optional<EpochSeconds> parse_iso8601(std::string_view s) {
  // Trim surrounding whitespace.
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.size() < 19) return std::nullopt;

  CivilDateTime c;
  if (!parse_int(s, 0, 4, c.year) || s[4] != '-' || !parse_int(s, 5, 2, c.month) ||
      s[7] != '-' || !parse_int(s, 8, 2, c.day))
    return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ' && s[10] != 't') return std::nullopt;
  if (!parse_int(s, 11, 2, c.hour) || s[13] != ':' || !parse_int(s, 14, 2, c.minute) ||
      s[16] != ':' || !parse_int(s, 17, 2, c.second))
    return std::nullopt;

  if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > days_in_month(c.year, c.month) ||
      c.hour > 23 || c.minute > 59 || c.second > 60)
    return std::nullopt;
  if (c.second == 60) c.second = 59;  // fold leap seconds

  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }

  int64_t offset = 0;
  if (pos < s.size()) {
    char ch = s[pos];
    if (ch == 'Z' || ch == 'z') {
      ++pos;
    } else if (ch == '+' || ch == '-') {
      int sign = ch == '+' ? 1 : -1;
      ++pos;
      int oh = 0, om = 0;
      if (!parse_int(s, pos, 2, oh)) return std::nullopt;
      pos += 2;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size()) {
        if (!parse_int(s, pos, 2, om)) return std::nullopt;
        pos += 2;
      }
      if (oh > 23 || om > 59) return std::nullopt;
      offset = sign * (oh * 3600 + om * 60);
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  return epoch_from_civil(c) - offset;
}

std::string format_iso8601(EpochSeconds t) {
  CivilDateTime c = civil_from_epoch(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month,
                c.day, c.hour, c.minute, c.second);
  return buf;
}

YearMonth year_month_of(EpochSeconds t) {
  CivilDateTime c = civil_from_epoch(t);
  return {c.year, c.month};
}

EpochSeconds month_start_epoch(YearMonth ym) {
  return days_from_civil(ym.year, ym.month, 1) * kSecondsPerDay;
}

YearMonth add_months(YearMonth ym, int n) {
  int idx = ym.year * 12 + (ym.month - 1) + n;
  int year = idx / 12;
  int month = idx % 12;
  if (month < 0) {
    month += 12;
    --year;
  }
  return {year, month + 1};
}

std::string format_year_month(YearMonth ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
  return buf;
}

std::optional<YearMonth> parse_year_month(std::string_view s) {
  if (s.size() != 7 || s[4] != '-') return std::nullopt;
  int y = 0, m = 0;
  if (!parse_int(s, 0, 4, y) || !parse_int(s, 5, 2, m)) return std::nullopt;
  if (m < 1 || m > 12) return std::nullopt;
  return YearMonth{y, m};
}

}  // namespace conloc::timeutil
