#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace pmrank {

// Civil calendar date. Thin value wrapper over a day count since 1970-01-01,
// with ISO-8601 text conversion and the calendar arithmetic the rating
// pipeline needs (day distances, month offsets with day-of-month clamping).
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);

  // Parses "YYYY-MM-DD". Throws pmrank::Error on anything else.
  static Date parse(std::string_view iso);

  std::string toIso() const;

  int year() const;
  unsigned month() const;
  unsigned day() const;

  // Days since 1970-01-01.
  long dayNumber() const { return days_; }

  Date addDays(long n) const;
  // Calendar-month shift; an invalid day-of-month clamps to the month end.
  Date addMonths(int n) const;

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  explicit Date(long days) : days_(days) {}
  long days_ = 0;
};

// b - a in whole days.
inline long daysBetween(const Date& a, const Date& b) {
  return b.dayNumber() - a.dayNumber();
}

}  // namespace pmrank
