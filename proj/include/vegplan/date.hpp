#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vegplan {

/// Calendar day in the proleptic Gregorian calendar, stored as days since
/// 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);
  /// Accepts `YYYY-MM-DD` only; rejects impossible days such as 2023-02-30.
  static std::optional<Date> parse(std::string_view text);

  std::int32_t days() const noexcept { return days_; }
  int year() const;
  unsigned month() const;
  unsigned day() const;
  std::string str() const;

  Date operator+(std::int32_t n) const { return Date(days_ + n); }
  Date operator-(std::int32_t n) const { return Date(days_ - n); }
  std::int32_t operator-(Date other) const { return days_ - other.days_; }

  friend constexpr auto operator<=>(Date, Date) = default;

 private:
  std::int32_t days_ = 0;
};

/// Time of day with millisecond resolution.
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;
  constexpr explicit TimeOfDay(std::int32_t ms) : ms_(ms) {}

  /// Accepts `HH:MM`, `HH:MM:SS` and `HH:MM:SS.fff`.
  static std::optional<TimeOfDay> parse(std::string_view text);

  std::int32_t milliseconds() const noexcept { return ms_; }
  /// `HH:MM:SS`, with a `.fff` suffix only when the milliseconds are nonzero.
  std::string str() const;

  friend constexpr auto operator<=>(TimeOfDay, TimeOfDay) = default;

 private:
  std::int32_t ms_ = 0;
};

}  // namespace vegplan
