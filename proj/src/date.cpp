#include "vegplan/date.hpp"

#include <charconv>
#include <cstdio>

namespace vegplan {

namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
  int y;
  unsigned m;
  unsigned d;
};

Civil civil_from_days(std::int32_t z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

template <typename T>
bool parse_fixed(std::string_view text, T& out) {
  if (text.empty()) return false;
  for (char c : text)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  return Date(days_from_civil(year, month, day));
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  if (!parse_fixed(text.substr(0, 4), y) || !parse_fixed(text.substr(5, 2), m) ||
      !parse_fixed(text.substr(8, 2), d))
    return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  return from_ymd(y, m, d);
}

int Date::year() const { return civil_from_days(days_).y; }
unsigned Date::month() const { return civil_from_days(days_).m; }
unsigned Date::day() const { return civil_from_days(days_).d; }

std::string Date::str() const {
  const Civil c = civil_from_days(days_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.y, c.m, c.d);
  return buf;
}

std::optional<TimeOfDay> TimeOfDay::parse(std::string_view text) {
  if (text.size() < 5 || text[2] != ':') return std::nullopt;
  int h = 0, m = 0, s = 0, ms = 0;
  if (!parse_fixed(text.substr(0, 2), h) || !parse_fixed(text.substr(3, 2), m)) return std::nullopt;
  std::string_view rest = text.substr(5);
  if (!rest.empty()) {
    if (rest.size() < 3 || rest[0] != ':' || !parse_fixed(rest.substr(1, 2), s)) return std::nullopt;
    rest = rest.substr(3);
    if (!rest.empty()) {
      if (rest[0] != '.' || rest.size() < 2 || rest.size() > 4) return std::nullopt;
      std::string_view frac = rest.substr(1);
      if (!parse_fixed(frac, ms)) return std::nullopt;
      for (std::size_t i = frac.size(); i < 3; ++i) ms *= 10;
    }
  }
  if (h > 23 || m > 59 || s > 59) return std::nullopt;
  return TimeOfDay(((h * 60 + m) * 60 + s) * 1000 + ms);
}

std::string TimeOfDay::str() const {
  const int total_s = ms_ / 1000;
  const int frac = ms_ % 1000;
  char buf[24];
  if (frac == 0)
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", total_s / 3600, total_s / 60 % 60, total_s % 60);
  else
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d.%03d", total_s / 3600, total_s / 60 % 60,
                  total_s % 60, frac);
  return buf;
}

}  // namespace vegplan
