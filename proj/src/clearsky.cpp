#include "pvfc/clearsky.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pvfc/error.hpp"

namespace pvfc::clearsky {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void fill_hour(const SiteConfig& site, UtcHour start, std::size_t i, double& ghi, double& power) {
  const double t = static_cast<double>(start.hours_since_epoch() + static_cast<std::int64_t>(i)) + 0.5;
  const SolarPosition pos = solar_position(site, t);
  ghi = clearsky_ghi(pos.zenith);
  power = clearsky_power(ghi, site);
}

}  // namespace

ClearSkyProfile ClearSkyProfile::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > size()) throw Error(ErrorCode::InvalidArgument, "profile slice out of range");
  ClearSkyProfile out;
  out.start = start + static_cast<std::int64_t>(offset);
  auto b = static_cast<std::ptrdiff_t>(offset);
  auto e = static_cast<std::ptrdiff_t>(offset + count);
  out.power_kw.assign(power_kw.begin() + b, power_kw.begin() + e);
  out.ghi_wm2.assign(ghi_wm2.begin() + b, ghi_wm2.begin() + e);
  return out;
}

double solar_declination(int day_of_year) {
  if (day_of_year < 1 || day_of_year > 366) {
    throw Error(ErrorCode::OutOfRangeDay, "day of year " + std::to_string(day_of_year));
  }
  return 23.45 * std::sin(2.0 * std::numbers::pi * (284.0 + day_of_year) / 365.0);
}

double solar_zenith(double latitude, double declination, double hour_angle) {
  if (!std::isfinite(latitude) || !std::isfinite(declination) || !std::isfinite(hour_angle) ||
      std::abs(latitude) > 90.0) {
    throw Error(ErrorCode::InvalidArgument, "solar_zenith: bad input");
  }
  const double cos_z = std::sin(latitude * kDeg) * std::sin(declination * kDeg) +
                       std::cos(latitude * kDeg) * std::cos(declination * kDeg) * std::cos(hour_angle * kDeg);
  return std::acos(std::clamp(cos_z, -1.0, 1.0)) / kDeg;
}

double hour_angle(double utc_hours, double longitude) {
  double solar_time = std::fmod(utc_hours + longitude / 15.0, 24.0);
  if (solar_time < 0.0) solar_time += 24.0;
  return 15.0 * (solar_time - 12.0);
}

SolarPosition solar_position(const SiteConfig& site, double utc_hours) {
  // Declination is held for the whole local civil day.
  const auto whole = static_cast<std::int64_t>(std::floor(utc_hours));
  const int doy = UtcHour(whole).day_of_year(site.tz_offset());
  SolarPosition p;
  p.declination = solar_declination(doy);
  p.hour_angle = hour_angle(utc_hours, site.longitude());
  p.zenith = solar_zenith(site.latitude(), p.declination, p.hour_angle);
  return p;
}

double clearsky_ghi(double zenith) {
  const double cos_z = std::cos(zenith * kDeg);
  if (zenith >= 90.0 || cos_z <= 0.0) return 0.0;
  return kHaurwitzPeak * cos_z * std::exp(-0.057 / cos_z);
}

double clearsky_power(double ghi, const SiteConfig& site) {
  if (!(ghi >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ghi must be >= 0");
  return std::min(site.ac_rating(), site.system_efficiency() * site.dc_rating() * ghi / 1000.0);
}

ClearSkyProfile clearsky_profile(const SiteConfig& site, UtcHour start, std::size_t n_hours) {
  if (n_hours == 0) throw Error(ErrorCode::InvalidArgument, "n_hours must be >= 1");
  ClearSkyProfile out;
  out.start = start;
  out.power_kw.resize(n_hours);
  out.ghi_wm2.resize(n_hours);
  const auto n = static_cast<std::ptrdiff_t>(n_hours);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    fill_hour(site, start, k, out.ghi_wm2[k], out.power_kw[k]);
  }
  return out;
}

ClearSkyProfile clearsky_profile_serial(const SiteConfig& site, UtcHour start, std::size_t n_hours) {
  if (n_hours == 0) throw Error(ErrorCode::InvalidArgument, "n_hours must be >= 1");
  ClearSkyProfile out;
  out.start = start;
  out.power_kw.resize(n_hours);
  out.ghi_wm2.resize(n_hours);
  for (std::size_t i = 0; i < n_hours; ++i) fill_hour(site, start, i, out.ghi_wm2[i], out.power_kw[i]);
  return out;
}

}  // namespace pvfc::clearsky
