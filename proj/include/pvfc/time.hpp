#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pvfc {

/// A UTC instant truncated to the hour, stored as hours since 1970-01-01T00Z.
class UtcHour {
 public:
  constexpr UtcHour() = default;
  constexpr explicit UtcHour(std::int64_t hours_since_epoch) : hours_(hours_since_epoch) {}

  static UtcHour from_civil(int year, unsigned month, unsigned day, int hour);

  /// Parses `YYYY-MM-DDTHH:00:00Z`; any non-zero minute or second is rejected.
  static UtcHour parse_iso(std::string_view text);

  constexpr std::int64_t hours_since_epoch() const { return hours_; }
  std::string iso() const;

  /// Day of year (1..366) of this instant shifted by `offset_hours`.
  int day_of_year(double offset_hours = 0.0) const;

  constexpr UtcHour operator+(std::int64_t h) const { return UtcHour(hours_ + h); }
  constexpr UtcHour operator-(std::int64_t h) const { return UtcHour(hours_ - h); }
  constexpr std::int64_t operator-(UtcHour other) const { return hours_ - other.hours_; }
  constexpr auto operator<=>(const UtcHour&) const = default;

 private:
  std::int64_t hours_ = 0;
};

}  // namespace pvfc
