#pragma once

// Data preparation around the clear-sky profile: offset removal, clear-sky
// index normalization (the stationarizing transform) with nighttime removal,
// and the inverse mapping back to kW.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pvfc/clearsky.hpp"
#include "pvfc/core_model.hpp"

namespace pvfc::preprocess {

struct Options {
  /// Hours whose clear-sky power is below this fraction of ac_rating are night.
  double day_threshold_fraction = 0.01;
  double kappa_max = 1.5;
};

struct PreprocessedSeries {
  std::vector<double> index_values;
  std::vector<bool> day_mask;
  double offset_kw = 0.0;
  UtcHour source_start;
  std::size_t source_n = 0;
  std::size_t clip_count = 0;

  std::size_t day_count() const { return index_values.size(); }
};

struct OffsetResult {
  HourlyPowerSeries series;
  double offset_kw;
};

/// Subtracts the median night (zero clear-sky power) reading and clamps at 0.
/// Throws NoNightHours when the profile has no zero-power hour.
OffsetResult remove_offset(const HourlyPowerSeries& series, const clearsky::ClearSkyProfile& profile);

/// Day mask of a profile under the threshold rule.
std::vector<bool> day_mask(const clearsky::ClearSkyProfile& profile, const SiteConfig& site,
                           const Options& opt = {});

PreprocessedSeries normalize_and_mask(const HourlyPowerSeries& series,
                                      const clearsky::ClearSkyProfile& profile, const SiteConfig& site,
                                      const Options& opt = {});

PreprocessedSeries preprocess(const HourlyPowerSeries& series, const clearsky::ClearSkyProfile& profile,
                              const SiteConfig& site, const Options& opt = {});

/// Day hours get index * clear-sky power, night hours exactly 0 kW.
/// `level`/`site_id` tag the returned series.
HourlyPowerSeries postprocess(std::span<const double> index_values, const std::vector<bool>& day_mask,
                              const clearsky::ClearSkyProfile& profile,
                              MeasurementLevel level = MeasurementLevel::Customer,
                              std::string site_id = "forecast");

}  // namespace pvfc::preprocess
