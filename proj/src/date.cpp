#include "pmrank/date.hpp"

#include <charconv>
#include <chrono>
#include <stdexcept>

#include "pmrank/types.hpp"

namespace pmrank {

namespace {

namespace chr = std::chrono;

chr::year_month_day toYmd(long days) {
  return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

long fromYmd(const chr::year_month_day& ymd) {
  return chr::sys_days{ymd}.time_since_epoch().count();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) {
    throw Error("invalid calendar date " + std::to_string(year) + "-" +
                std::to_string(month) + "-" + std::to_string(day));
  }
  days_ = fromYmd(ymd);
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw Error("expected ISO-8601 date YYYY-MM-DD, got '" + std::string(iso) + "'");
  }
  auto num = [&](int from, int to) -> int {
    int value = 0;
    auto [ptr, ec] = std::from_chars(iso.data() + from, iso.data() + to, value);
    if (ec != std::errc{} || ptr != iso.data() + to) {
      throw Error("bad numeric field in date '" + std::string(iso) + "'");
    }
    return value;
  };
  return Date(num(0, 4), static_cast<unsigned>(num(5, 7)),
              static_cast<unsigned>(num(8, 10)));
}

std::string Date::toIso() const {
  auto ymd = toYmd(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

int Date::year() const { return int(toYmd(days_).year()); }
unsigned Date::month() const { return unsigned(toYmd(days_).month()); }
unsigned Date::day() const { return unsigned(toYmd(days_).day()); }

Date Date::addDays(long n) const { return Date(days_ + n); }

Date Date::addMonths(int n) const {
  auto ymd = toYmd(days_);
  ymd += chr::months{n};
  if (!ymd.ok()) {
    ymd = ymd.year() / ymd.month() / chr::last;
  }
  return Date(fromYmd(ymd));
}

}  // namespace pmrank
