#pragma once

// Closed-form clear-sky PV model: Cooper declination, spherical zenith,
// Haurwitz GHI and a linear PV conversion with inverter clipping. It stands in
// for a full performance model and only needs to get the diurnal envelope
// right, since it is used as the normalization denominator.

#include <cstddef>
#include <vector>

#include "pvfc/core_model.hpp"

namespace pvfc::clearsky {

inline constexpr double kHaurwitzPeak = 1098.0;

struct SolarPosition {
  double declination = 0.0;
  double hour_angle = 0.0;
  double zenith = 0.0;
};

struct ClearSkyProfile {
  UtcHour start;
  std::vector<double> power_kw;
  std::vector<double> ghi_wm2;

  std::size_t size() const { return power_kw.size(); }
  ClearSkyProfile slice(std::size_t offset, std::size_t count) const;
};

/// Cooper's formula; throws OutOfRangeDay outside [1, 366].
double solar_declination(int day_of_year);

/// Zenith angle in degrees from latitude, declination and hour angle (all degrees).
double solar_zenith(double latitude, double declination, double hour_angle);

/// Hour angle at a UTC instant given in fractional hours since epoch. The
/// equation of time is ignored, so solar noon falls at 12 - longitude/15 UTC.
double hour_angle(double utc_hours, double longitude);

SolarPosition solar_position(const SiteConfig& site, double utc_hours);

/// Haurwitz clear-sky global horizontal irradiance, W/m^2.
double clearsky_ghi(double zenith);

double clearsky_power(double ghi, const SiteConfig& site);

/// One value per hour, each evaluated at minute 30 of its hour.
ClearSkyProfile clearsky_profile(const SiteConfig& site, UtcHour start, std::size_t n_hours);

/// Serial reference for `clearsky_profile`.
ClearSkyProfile clearsky_profile_serial(const SiteConfig& site, UtcHour start, std::size_t n_hours);

}  // namespace pvfc::clearsky
