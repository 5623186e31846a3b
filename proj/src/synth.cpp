#include "pvfc/synth.hpp"

#include <algorithm>
#include <cmath>

#include "pvfc/error.hpp"

namespace pvfc::synth {

namespace {

constexpr std::uint64_t kScheduleStream = 0x53434845;
constexpr std::uint64_t kFieldStream = 0x4649454c;
constexpr std::uint64_t kCustomerStream = 0x43555354;
constexpr std::uint64_t kNoiseStream = 0x4e4f4953;

std::vector<double> ar1_deviation(const std::vector<Weather>& hour_regimes, const SynthConfig& c, Rng& rng,
                                  double sigma_scale, double rho) {
  std::vector<double> z(hour_regimes.size());
  double prev = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    const double sd = sigma_scale * c.regime_sigma_of(hour_regimes[t]);
    // Draw even when sd is zero so the stream layout does not depend on sigma.
    const double e = rng.normal();
    prev = rho * prev + sd * e;
    z[t] = prev;
  }
  return z;
}

double meter_noise(Rng& rng, double sd) { return sd * rng.normal(); }

}  // namespace

void SynthConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  require(n_customers >= 1, "n_customers must be >= 1");
  require(n_feeders >= 1 && n_feeders <= n_customers, "n_feeders must be in [1, n_customers]");
  require(days >= 31, "days must be >= 31");
  require(regime_schedule.empty() || regime_schedule.size() == days, "regime_schedule needs one entry per day");
  require(ar_rho >= 0.0 && ar_rho < 1.0, "ar_rho must be in [0, 1)");
  require(loss_fraction >= 0.0 && loss_fraction < 0.1, "loss_fraction must be in [0, 0.1)");
  require(meter_noise_sd >= 0.0, "meter_noise_sd must be >= 0");
  require(field_rho >= 0.0 && field_rho < 1.0, "field_rho must be in [0, 1)");
  require(field_sigma_scale >= 0.0, "field_sigma_scale must be >= 0");
  require(monitored_feeders >= 1 && monitored_feeders <= n_feeders, "monitored_feeders must be in [1, n_feeders]");
  require(persistence >= 0.0 && persistence <= 1.0, "persistence must be in [0, 1]");
  require(kappa_max > 0.0, "kappa_max must be > 0");
  require(feeder_lead_hours.empty() || feeder_lead_hours.size() == n_feeders,
          "feeder_lead_hours needs one entry per feeder");
}

std::vector<std::size_t> default_topology(std::size_t n_customers, std::size_t n_feeders) {
  std::vector<std::size_t> map(n_customers);
  for (std::size_t i = 0; i < n_customers; ++i) map[i] = i * n_feeders / n_customers;
  return map;
}

std::vector<Weather> random_schedule(std::size_t days, std::uint64_t seed, double persistence) {
  Rng rng(substream_seed(seed, {kScheduleStream}));
  std::vector<Weather> out;
  out.reserve(days);
  for (std::size_t k = 0; k < days; ++k) {
    const double u = rng.uniform();
    const double v = rng.uniform();
    if (k > 0 && u < persistence) {
      out.push_back(out.back());
    } else if (k == 0) {
      out.push_back(kAllWeather[static_cast<std::size_t>(v * 3.0)]);
    } else {
      // One of the two other regimes.
      const auto prev = static_cast<std::size_t>(out.back());
      out.push_back(kAllWeather[(prev + 1 + static_cast<std::size_t>(v * 2.0)) % 3]);
    }
  }
  return out;
}

std::vector<double> gen_customer_index(const std::vector<Weather>& hour_regimes, const SynthConfig& config,
                                       Rng& stream, double sigma_scale) {
  const auto z = ar1_deviation(hour_regimes, config, stream, sigma_scale, config.ar_rho);
  std::vector<double> k(z.size());
  for (std::size_t t = 0; t < z.size(); ++t) {
    k[t] = std::clamp(config.regime_mean_of(hour_regimes[t]) + z[t], 0.0, config.kappa_max);
  }
  return k;
}

Aggregation aggregate(const std::vector<std::vector<double>>& customers_kw,
                      const std::vector<std::size_t>& topology, std::size_t n_feeders,
                      const std::vector<bool>& day, const SynthConfig& config) {
  if (topology.size() < customers_kw.size()) {
    throw Error(ErrorCode::UnmappedCustomer, "customer " + std::to_string(topology.size()) + " has no feeder");
  }
  const std::size_t n = day.size();
  Aggregation out;
  out.feeders.assign(n_feeders, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < customers_kw.size(); ++i) {
    if (topology[i] >= n_feeders) {
      throw Error(ErrorCode::UnmappedCustomer, "customer " + std::to_string(i) + " maps to unknown feeder");
    }
    auto& f = out.feeders[topology[i]];
    for (std::size_t t = 0; t < n; ++t) f[t] += customers_kw[i][t];
  }
  for (std::size_t j = 0; j < n_feeders; ++j) {
    Rng rng(substream_seed(config.seed, {kNoiseStream, 1, j}));
    for (std::size_t t = 0; t < n; ++t) {
      const double e = meter_noise(rng, config.meter_noise_sd);
      if (day[t]) out.feeders[j][t] = std::max(0.0, out.feeders[j][t] + e);
    }
  }
  Rng rng(substream_seed(config.seed, {kNoiseStream, 2}));
  out.substation.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (const auto& f : out.feeders) sum += f[t];
    const double e = meter_noise(rng, config.meter_noise_sd);
    out.substation[t] = (1.0 - config.loss_fraction) * sum;
    if (day[t]) out.substation[t] = std::max(0.0, out.substation[t] + e);
  }
  return out;
}

SynthOutput gen_dataset(const SynthConfig& config, const SiteConfig& site) {
  config.validate();
  const std::size_t n_hours = config.days * 24;
  const auto profile = clearsky::clearsky_profile(site, config.start, n_hours);

  // One extra day of regimes so upwind feeders can see past the last day.
  std::vector<Weather> schedule = config.regime_schedule.empty()
                                      ? random_schedule(config.days + 1, config.seed, config.persistence)
                                      : config.regime_schedule;
  const std::vector<Weather> visible(schedule.begin(), schedule.begin() + static_cast<std::ptrdiff_t>(config.days));
  if (schedule.size() == config.days) schedule.push_back(schedule.back());

  std::vector<bool> day(n_hours);
  std::vector<std::size_t> day_hours;  // wall-clock hour of each day-hour
  std::vector<Weather> hour_regimes;
  for (std::size_t t = 0; t < n_hours; ++t) {
    day[t] = profile.power_kw[t] > 0.0;
    if (day[t]) {
      day_hours.push_back(t);
      hour_regimes.push_back(schedule[t / 24]);
    }
  }
  std::size_t max_lead = 0;
  for (std::size_t j = 0; j < config.n_feeders; ++j) max_lead = std::max(max_lead, config.lead_of(j));
  // Beyond the end the field follows the extra day's regime.
  hour_regimes.insert(hour_regimes.end(), max_lead, schedule[config.days]);

  Rng field_rng(substream_seed(config.seed, {kFieldStream}));
  const auto field = ar1_deviation(hour_regimes, config, field_rng, config.field_sigma_scale, config.field_rho);

  const auto topology = default_topology(config.n_customers, config.n_feeders);
  const std::size_t T = day_hours.size();
  std::vector<std::vector<double>> customers(config.n_customers, std::vector<double>(n_hours, 0.0));
  for (std::size_t i = 0; i < config.n_customers; ++i) {
    const std::size_t lead = config.lead_of(topology[i]);
    std::vector<Weather> seen(hour_regimes.begin() + static_cast<std::ptrdiff_t>(lead),
                              hour_regimes.begin() + static_cast<std::ptrdiff_t>(lead + T));
    Rng rng(substream_seed(config.seed, {kCustomerStream, i}));
    const auto jitter = ar1_deviation(seen, config, rng, 1.0, config.ar_rho);
    for (std::size_t tau = 0; tau < T; ++tau) {
      const double kappa = std::clamp(config.regime_mean_of(seen[tau]) + field[tau + lead] + jitter[tau], 0.0,
                                      config.kappa_max);
      const std::size_t t = day_hours[tau];
      customers[i][t] = kappa * profile.power_kw[t];
    }
  }

  const auto agg = aggregate(customers, topology, config.n_feeders, day, config);

  std::size_t n_c = 0;
  std::size_t n_f = 0;
  std::vector<double> customer_level(n_hours, 0.0);
  std::vector<double> feeder_level(n_hours, 0.0);
  Rng c_noise(substream_seed(config.seed, {kNoiseStream, 0}));
  for (std::size_t i = 0; i < config.n_customers; ++i) {
    if (topology[i] != 0) continue;
    ++n_c;
    for (std::size_t t = 0; t < n_hours; ++t) customer_level[t] += customers[i][t];
  }
  for (std::size_t t = 0; t < n_hours; ++t) {
    const double e = meter_noise(c_noise, config.meter_noise_sd);
    if (day[t]) customer_level[t] = std::max(0.0, customer_level[t] + e);
  }
  for (std::size_t i = 0; i < config.n_customers; ++i) n_f += topology[i] < config.monitored_feeders ? 1 : 0;
  for (std::size_t j = 0; j < config.monitored_feeders; ++j) {
    for (std::size_t t = 0; t < n_hours; ++t) feeder_level[t] += agg.feeders[j][t];
  }

  auto ds = align_levels(HourlyPowerSeries("synth", MeasurementLevel::Customer, config.start, customer_level),
                         HourlyPowerSeries("synth", MeasurementLevel::Feeder, config.start, feeder_level),
                         HourlyPowerSeries("synth", MeasurementLevel::Substation, config.start, agg.substation),
                         site);
  return {std::move(ds), profile,
          {static_cast<double>(n_c), static_cast<double>(n_f), static_cast<double>(config.n_customers)},
          visible};
}

}  // namespace pvfc::synth
