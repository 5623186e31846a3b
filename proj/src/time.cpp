#include "pvfc/time.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "pvfc/error.hpp"

namespace pvfc {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  auto first = text.data() + pos;
  auto last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::ParseError, "bad timestamp field in '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

UtcHour UtcHour::from_civil(int year, unsigned month, unsigned day, int hour) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok() || hour < 0 || hour > 23) {
    throw Error(ErrorCode::ParseError, "invalid calendar date");
  }
  auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return UtcHour(static_cast<std::int64_t>(days_since_epoch) * 24 + hour);
}

UtcHour UtcHour::parse_iso(std::string_view text) {
  // 2016-07-01T12:00:00Z
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    throw Error(ErrorCode::ParseError, "expected YYYY-MM-DDTHH:00:00Z, got '" + std::string(text) + "'");
  }
  int year = parse_int(text, 0, 4);
  int month = parse_int(text, 5, 2);
  int day = parse_int(text, 8, 2);
  int hour = parse_int(text, 11, 2);
  int minute = parse_int(text, 14, 2);
  int second = parse_int(text, 17, 2);
  if (minute != 0 || second != 0) {
    throw Error(ErrorCode::ParseError, "timestamp not hour-aligned: '" + std::string(text) + "'");
  }
  if (month < 1 || day < 1) throw Error(ErrorCode::ParseError, "invalid calendar date");
  return from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day), hour);
}

std::string UtcHour::iso() const {
  using namespace std::chrono;
  std::int64_t days = hours_ >= 0 ? hours_ / 24 : -((-hours_ + 23) / 24);
  int hour = static_cast<int>(hours_ - days * 24);
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00Z", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour);
  return buf;
}

int UtcHour::day_of_year(double offset_hours) const {
  using namespace std::chrono;
  double local = static_cast<double>(hours_) + offset_hours;
  auto days = static_cast<std::int64_t>(std::floor(local / 24.0));
  sys_days date{std::chrono::days{days}};
  year_month_day ymd{date};
  sys_days jan1{ymd.year() / January / 1};
  return static_cast<int>((date - jan1).count()) + 1;
}

}  // namespace pvfc
