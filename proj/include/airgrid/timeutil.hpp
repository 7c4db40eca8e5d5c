#pragma once

#include <cstdint>
#include <string>

namespace airgrid {

// UTC timestamp at hourly resolution: whole hours since 1970-01-01T00:00Z.
struct UtcHour {
  int64_t value = 0;

  auto operator<=>(const UtcHour&) const = default;
  UtcHour operator+(int64_t h) const { return UtcHour{value + h}; }
  int64_t operator-(UtcHour o) const { return value - o.value; }
};

struct CalendarParts {
  int year;
  int month;        // 1..12
  int day;          // 1..31
  int hour;         // 0..23
  int day_of_week;  // 0 = Monday .. 6 = Sunday
  int iso_week;     // 1..53
};

int64_t days_from_civil(int y, int m, int d);
void civil_from_days(int64_t days, int& y, int& m, int& d);

UtcHour make_hour(int year, int month, int day, int hour);
CalendarParts calendar_parts(UtcHour t);
int year_of(UtcHour t);

// Calendar decomposition used as the temporal feature family.
struct TemporalFeatures {
  int hour;         // 0..23
  int day_of_week;  // 0 = Monday
  int iso_week;     // 1..53
  int month;        // 1..12
};
TemporalFeatures temporal_features(UtcHour t);

// Accepts YYYY-MM-DDTHH:MM:SSZ and YYYY-MM-DDTHH:MMZ (and a space instead
// of 'T'); minutes and seconds must be zero at hourly resolution.
UtcHour parse_iso_hour(const std::string& s);
std::string format_iso_hour(UtcHour t);

}  // namespace airgrid
