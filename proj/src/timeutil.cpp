#include "airgrid/timeutil.hpp"

#include <cstdio>

#include "airgrid/errors.hpp"

namespace airgrid {

// Proleptic Gregorian day count (Howard Hinnant's civil algorithms).
int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yy + (m <= 2));
}

UtcHour make_hour(int year, int month, int day, int hour) {
  return UtcHour{days_from_civil(year, month, day) * 24 + hour};
}

namespace {

int weekday_mon0(int64_t days) {
  // 1970-01-01 was a Thursday (ISO index 3 with Monday = 0).
  int64_t w = (days % 7 + 7 + 3) % 7;
  return static_cast<int>(w);
}

int iso_week_of(int y, int m, int d) {
  const int64_t days = days_from_civil(y, m, d);
  // Week 1 contains the first Thursday of the year; shift to that Thursday
  // and count whole weeks from its January 1st.
  const int64_t thursday = days + (3 - weekday_mon0(days));
  int ty, tm, td;
  civil_from_days(thursday, ty, tm, td);
  const int64_t jan1 = days_from_civil(ty, 1, 1);
  return static_cast<int>((thursday - jan1) / 7) + 1;
}

}  // namespace

CalendarParts calendar_parts(UtcHour t) {
  int64_t days = t.value / 24;
  int hour = static_cast<int>(t.value % 24);
  if (hour < 0) {
    hour += 24;
    days -= 1;
  }
  CalendarParts p{};
  civil_from_days(days, p.year, p.month, p.day);
  p.hour = hour;
  p.day_of_week = weekday_mon0(days);
  p.iso_week = iso_week_of(p.year, p.month, p.day);
  return p;
}

int year_of(UtcHour t) {
  return calendar_parts(t).year;
}

TemporalFeatures temporal_features(UtcHour t) {
  const CalendarParts p = calendar_parts(t);
  return TemporalFeatures{p.hour, p.day_of_week, p.iso_week, p.month};
}

UtcHour parse_iso_hour(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char sep = 0;
  int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &se);
  if (n < 6 || (sep != 'T' && sep != ' '))
    throw ValidationError("bad timestamp: '" + s + "'");
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23)
    throw ValidationError("timestamp out of range: '" + s + "'");
  if (mi != 0 || se != 0)
    throw ValidationError("timestamp not on an hour boundary: '" + s + "'");
  return make_hour(y, mo, d, h);
}

std::string format_iso_hour(UtcHour t) {
  const CalendarParts p = calendar_parts(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00:00Z", p.year, p.month, p.day, p.hour);
  return buf;
}

}  // namespace airgrid
