#pragma once

// Seeded multi-level PV data for desk-scale checks.
//
// Weather is a per-day regime (mean clear-sky index) plus AR(1) deviations on
// the day-hour timeline. A shared, slowly varying cloud field drifts across
// the service area. Monitored feeder j sees regime and field
// `lead_step_hours * j` day-hours before the customer area on feeder 0 does;
// unmonitored feeders are further upwind by `far_lead_hours`, so only the
// substation meter carries that early view. Each customer adds its own AR(1)
// jitter (ar_rho, regime_sigma). Feeder
// meters sum their customers; the substation meter sums all feeders less a
// line-loss fraction. The feeder-level series is the sum of the monitored
// feeders, the customer-level series the sum of feeder 0's customers.
//
// Every entity draws from its own substream of the root seed.

#include <array>
#include <cstdint>
#include <vector>

#include "pvfc/clearsky.hpp"
#include "pvfc/core_model.hpp"
#include "pvfc/random.hpp"

namespace pvfc::synth {

struct SynthConfig {
  std::size_t n_customers = 96;
  std::size_t n_feeders = 4;
  std::size_t days = 90;
  std::vector<Weather> regime_schedule;  ///< one entry per day; empty -> generated from seed
  double ar_rho = 0.5;
  double loss_fraction = 0.03;
  double meter_noise_sd = 0.05;  ///< kW, per meter reading
  std::uint64_t seed = 1;

  std::array<double, 3> regime_mean = {0.95, 0.30, 0.60};   ///< Sunny, Cloudy, PartlyCloudy
  std::array<double, 3> regime_sigma = {0.02, 0.15, 0.25};  ///< AR(1) innovation sd
  double kappa_max = 1.5;

  /// Drifting field: AR(1) with its own coefficient, innovations equal to
  /// field_sigma_scale * regime_sigma.
  double field_rho = 0.9;
  double field_sigma_scale = 0.15;
  std::size_t lead_step_hours = 6;   ///< monitored feeder j leads by j * lead_step_hours
  std::size_t far_lead_hours = 12;   ///< lead of every unmonitored feeder
  /// Per-feeder lead in day hours; overrides the two keys above when set.
  std::vector<std::size_t> feeder_lead_hours;
  std::size_t monitored_feeders = 2;
  /// Probability that a day repeats the previous day's regime in generated schedules.
  double persistence = 1.0 / 3.0;

  UtcHour start = UtcHour::from_civil(2016, 4, 1, 7);

  void validate() const;
  std::size_t lead_of(std::size_t feeder) const {
    if (!feeder_lead_hours.empty()) return feeder_lead_hours.at(feeder);
    return feeder < monitored_feeders ? lead_step_hours * feeder : far_lead_hours;
  }
  double regime_mean_of(Weather w) const { return regime_mean[static_cast<std::size_t>(w)]; }
  double regime_sigma_of(Weather w) const { return regime_sigma[static_cast<std::size_t>(w)]; }
};

/// Customer -> feeder assignment; contiguous equal blocks.
std::vector<std::size_t> default_topology(std::size_t n_customers, std::size_t n_feeders);

std::vector<Weather> random_schedule(std::size_t days, std::uint64_t seed, double persistence);

/// AR(1) deviation around the regime mean, one value per entry of
/// `hour_regimes`, clamped to [0, kappa_max]. With `sigma_scale` 0 the series
/// is the constant regime mean.
std::vector<double> gen_customer_index(const std::vector<Weather>& hour_regimes, const SynthConfig& config,
                                       Rng& stream, double sigma_scale = 1.0);

struct Aggregation {
  std::vector<std::vector<double>> feeders;
  std::vector<double> substation;
};

/// feeder_j = sum of its customers + meter noise; substation = (1 - loss) * sum
/// of feeders + meter noise; all clamped at 0. Noise is drawn only where
/// `day` is true. Throws UnmappedCustomer if the topology misses a customer.
Aggregation aggregate(const std::vector<std::vector<double>>& customers_kw,
                      const std::vector<std::size_t>& topology, std::size_t n_feeders,
                      const std::vector<bool>& day, const SynthConfig& config);

struct SynthOutput {
  MultiLevelDataset dataset;
  clearsky::ClearSkyProfile profile;  ///< per-customer clear-sky power
  std::array<double, 3> level_scale;  ///< nameplate multiple of each level
  std::vector<Weather> schedule;
};

SynthOutput gen_dataset(const SynthConfig& config, const SiteConfig& site);

}  // namespace pvfc::synth
