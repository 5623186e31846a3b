#include "pvfc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "pvfc/error.hpp"
#include "pvfc/random.hpp"

namespace pvfc::pipeline {

namespace {

constexpr std::uint64_t kFitStream = 0x464954;
constexpr std::uint64_t kRawStream = 0x524157;
constexpr std::uint64_t kNarxStream = 0x4e415258;

template <typename T, typename Fn>
std::array<std::optional<T>, 3> for_levels_parallel(const LevelSet& levels, Fn&& fn) {
  std::array<std::optional<T>, 3> out;
  std::array<std::exception_ptr, 3> errors;
  std::vector<MeasurementLevel> todo(levels.begin(), levels.end());
  const auto n = static_cast<std::ptrdiff_t>(todo.size());
#pragma omp parallel for schedule(static, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto level = todo[static_cast<std::size_t>(i)];
    try {
      out[level_index(level)] = fn(level);
    } catch (...) {
      errors[level_index(level)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Scores only the hours of the day mask; night hours carry no information.
metrics::MetricReport day_report(std::span<const double> actual, std::span<const double> forecast,
                                 const std::vector<bool>& mask, double epsilon_kw) {
  std::vector<double> a, f;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    a.push_back(actual[i]);
    f.push_back(forecast[i]);
  }
  return metrics::report(a, f, epsilon_kw, metrics::ReportMode::Partial);
}

std::vector<double> tail(std::span<const double> v, std::size_t n) {
  return std::vector<double>(v.end() - static_cast<std::ptrdiff_t>(n), v.end());
}

}  // namespace

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::Case1: return "case1";
    case CaseId::Case2: return "case2";
    case CaseId::Case3: return "case3";
    case CaseId::Case4: return "case4";
  }
  return "unknown";
}

LevelSet case_levels(CaseId id) {
  using L = MeasurementLevel;
  switch (id) {
    case CaseId::Case1: return {};
    case CaseId::Case2: return {L::Customer, L::Feeder, L::Substation};
    case CaseId::Case3: return {L::Customer, L::Feeder};
    case CaseId::Case4: return {L::Customer};
  }
  return {};
}

double LevelErrors::baseline_min() const { return std::min({e_c, e_f, e_s}); }

bool target_condition(const LevelErrors& e) { return e.e_n.has_value() && *e.e_n < e.baseline_min(); }

double CaseResult::mape() const {
  if (case_id == CaseId::Case1) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : per_level_reports) m = std::min(m, r.mape);
    return m;
  }
  return per_level_reports.at(0).mape;
}

narnet::FittingModel select_best_fitting(const std::vector<narnet::FittingModel>& models) {
  if (models.empty()) throw Error(ErrorCode::EmptyList, "no fitting models to select from");
  const narnet::FittingModel* best = &models.front();
  for (const auto& m : models) {
    const bool better = m.fit_r2 > best->fit_r2 ||
                        (m.fit_r2 == best->fit_r2 &&
                         (m.fit_mape < best->fit_mape || (m.fit_mape == best->fit_mape && m.level < best->level)));
    if (better) best = &m;
  }
  return *best;
}

Weather classify_weather_day(std::span<const double> day_index_values, double sunny_threshold,
                             double cloudy_threshold) {
  if (day_index_values.empty()) throw Error(ErrorCode::EmptyDay, "no day-hour values");
  double sum = 0.0;
  for (double v : day_index_values) sum += v;
  const double mean = sum / static_cast<double>(day_index_values.size());
  if (mean >= sunny_threshold) return Weather::Sunny;
  if (mean <= cloudy_threshold) return Weather::Cloudy;
  return Weather::PartlyCloudy;
}

// ---- DayContext ------------------------------------------------------------

DayContext::DayContext(const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                       std::size_t forecast_day, const PipelineConfig& config)
    : dataset_(dataset), config_(config), day_(forecast_day) {
  if (profile.start != dataset.start() || profile.size() != dataset.size()) {
    throw Error(ErrorCode::MisalignedRange, "clear-sky profile does not cover the dataset");
  }
  if ((forecast_day + 1) * 24 > dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "forecast day " + std::to_string(forecast_day) +
                                                " lies outside the dataset");
  }
  if (history_hours() < kMinUsableHours) {
    throw Error(ErrorCode::InsufficientHistory, "forecast day " + std::to_string(forecast_day) +
                                                    " has fewer than 30 days of history");
  }
  for (auto level : kAllLevels) {
    const double scale = config_.level_scale[level_index(level)];
    auto& p = profiles_[level_index(level)];
    p = profile;
    for (double& v : p.power_kw) v *= scale;
    const auto site = config_.level_site(dataset_.site(), level);
    history_[level_index(level)] = preprocess::preprocess(
        dataset_.level(level).slice(0, history_hours()), history_profile(level), site, config_.prep);
  }
  day_mask_ = preprocess::day_mask(day_profile(config_.target_level),
                                   config_.level_site(dataset_.site(), config_.target_level), config_.prep);
}

clearsky::ClearSkyProfile DayContext::history_profile(MeasurementLevel l) const {
  return level_profile(l).slice(0, history_hours());
}

clearsky::ClearSkyProfile DayContext::day_profile(MeasurementLevel l) const {
  return level_profile(l).slice(history_hours(), 24);
}

HourlyPowerSeries DayContext::actual_day(MeasurementLevel l) const {
  return dataset_.level(l).slice(history_hours(), 24);
}

std::size_t DayContext::horizon() const {
  return static_cast<std::size_t>(std::count(day_mask_.begin(), day_mask_.end(), true));
}

std::vector<double> DayContext::actual_day_index(MeasurementLevel l) const {
  const auto actual = actual_day(l);
  const auto prof = day_profile(l);
  const double offset = history(l).offset_kw;
  std::vector<double> out;
  for (std::size_t i = 0; i < 24; ++i) {
    if (!day_mask_[i]) continue;
    out.push_back(std::clamp((actual[i] - offset) / prof.power_kw[i], 0.0, config_.prep.kappa_max));
  }
  return out;
}

double DayContext::epsilon_kw(MeasurementLevel l) const {
  return config_.epsilon_fraction * config_.level_site(dataset_.site(), l).ac_rating();
}

std::vector<narnet::FittingModel> DayContext::fitting_models(const LevelSet& levels) {
  LevelSet missing;
  for (auto l : levels) {
    if (!fits_[level_index(l)]) missing.insert(l);
  }
  auto trained = for_levels_parallel<narnet::FittingModel>(missing, [&](MeasurementLevel l) {
    narnet::NetworkConfig cfg = config_.network;
    cfg.seed = substream_seed(config_.seed, {kFitStream, level_index(l)});
    return narnet::fit_nar(history(l), cfg, l);
  });
  for (auto l : missing) fits_[level_index(l)] = std::move(trained[level_index(l)]);
  std::vector<narnet::FittingModel> out;
  for (auto l : levels) out.push_back(*fits_[level_index(l)]);
  return out;
}

const CaseResult& DayContext::baseline() {
  if (baseline_) return *baseline_;
  const LevelSet all(kAllLevels.begin(), kAllLevels.end());
  const std::size_t d = config_.network.delay_d;

  // Raw kW, no clear-sky processing. Values are divided by the level's ac
  // rating only so the network sees inputs of order one.
  auto forecasts = for_levels_parallel<HourlyPowerSeries>(all, [&](MeasurementLevel l) {
    const double ac = config_.level_site(dataset_.site(), l).ac_rating();
    const auto raw = dataset_.level(l).values().subspan(0, history_hours());
    std::vector<double> y(raw.begin(), raw.end());
    for (double& v : y) v /= ac;
    narnet::NetworkConfig cfg = config_.network;
    cfg.n_exo_channels = 0;
    cfg.seed = substream_seed(config_.seed, {kRawStream, level_index(l)});
    const auto set = narnet::make_training_set(y, {}, d);
    const auto net = narnet::train(narnet::init_network(cfg), set, cfg);
    auto pred = narnet::predict_closed_loop(net, tail(y, d), {}, {}, 24, config_.prep.kappa_max).values;
    for (double& v : pred) v *= ac;
    return HourlyPowerSeries(dataset_.level(l).site_id(), l, actual_day(l).start(), std::move(pred));
  });

  CaseResult r{.case_id = CaseId::Case1,
               .weather = classify_weather_day(actual_day_index(config_.target_level), config_.sunny_threshold,
                                               config_.cloudy_threshold),
               .per_level_reports = {},
               .levels_used = all,
               .forecast = *forecasts[level_index(config_.target_level)],
               .level_forecasts = {},
               .seed = config_.seed,
               .errors = std::nullopt,
               .attempts = 1,
               .narx_input_width = 0,
               .selected_level = std::nullopt};
  for (auto l : kAllLevels) {
    const auto actual = actual_day(l);
    r.per_level_reports.push_back(
        day_report(actual.values(), forecasts[level_index(l)]->values(), day_mask_, epsilon_kw(l)));
    r.level_forecasts.push_back(*forecasts[level_index(l)]);
  }
  baseline_ = std::move(r);
  return *baseline_;
}

std::vector<narnet::FittingModel> build_fitting_models(const MultiLevelDataset& dataset,
                                                       const clearsky::ClearSkyProfile& profile,
                                                       std::size_t forecast_day, const PipelineConfig& config) {
  DayContext ctx(dataset, profile, forecast_day, config);
  return ctx.fitting_models(LevelSet(kAllLevels.begin(), kAllLevels.end()));
}

// ---- NARX fusion -------------------------------------------------------------

DayAheadResult forecast_day_ahead(DayContext& ctx, const LevelSet& levels_used, CaseId case_id) {
  if (levels_used.empty()) throw Error(ErrorCode::EmptyList, "NARX needs at least one level");
  const auto& cfg = ctx.config();
  const std::size_t d = cfg.network.delay_d;
  const MeasurementLevel target = cfg.target_level;

  const auto fits = ctx.fitting_models(levels_used);
  const auto best = select_best_fitting(fits);

  // Exogenous channels: every used level's index series, then the fitting
  // model's open-loop output (its first d entries are the measured values).
  std::vector<narnet::Channel> exo_hist;
  for (auto l : levels_used) exo_hist.push_back(ctx.history(l).index_values);
  {
    const auto& yb = ctx.history(best.level).index_values;
    auto fit_out = narnet::predict_open_loop(best.net, yb, {});
    narnet::Channel channel(yb.begin(), yb.begin() + static_cast<std::ptrdiff_t>(d));
    channel.insert(channel.end(), fit_out.begin(), fit_out.end());
    exo_hist.push_back(std::move(channel));
  }
  const auto& y = ctx.history(target).index_values;
  const auto set = narnet::make_training_set(y, exo_hist, d);

  // Day-ahead values of each exogenous channel come from that level's own
  // NAR, run closed-loop over the horizon.
  const std::size_t horizon = ctx.horizon();
  std::vector<narnet::Channel> exo_seed;
  std::vector<narnet::Channel> exo_future;
  for (const auto& fm : fits) {
    const auto& idx = ctx.history(fm.level).index_values;
    exo_seed.push_back(tail(idx, d));
    exo_future.push_back(
        narnet::predict_closed_loop(fm.net, tail(idx, d), {}, {}, horizon, cfg.prep.kappa_max).values);
  }
  exo_seed.push_back(tail(exo_hist.back(), d));
  exo_future.push_back(exo_future[static_cast<std::size_t>(
      std::distance(levels_used.begin(), levels_used.find(best.level)))]);

  const auto& base = ctx.baseline();
  LevelErrors errors{.e_c = base.per_level_reports[0].mape,
                     .e_f = base.per_level_reports[1].mape,
                     .e_s = base.per_level_reports[2].mape,
                     .e_n = std::nullopt,
                     .target_met = false};
  const auto actual = ctx.actual_day(target);
  const auto day_prof = ctx.day_profile(target);
  const double eps = ctx.epsilon_kw(target);

  std::optional<HourlyPowerSeries> best_forecast;
  std::optional<metrics::MetricReport> best_report;
  std::uint64_t best_seed = 0;
  std::size_t attempts = 0;
  for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    narnet::NetworkConfig ncfg = cfg.network;
    ncfg.n_exo_channels = exo_hist.size();
    ncfg.seed = substream_seed(cfg.seed, {kNarxStream, attempt});
    const auto net = narnet::train(narnet::init_network(ncfg), set, ncfg);
    const auto index_fc =
        narnet::predict_closed_loop(net, tail(y, d), exo_seed, exo_future, horizon, cfg.prep.kappa_max);
    auto kw = preprocess::postprocess(index_fc.values, ctx.day_mask(), day_prof, target,
                                      ctx.dataset().level(target).site_id());
    auto rep = day_report(actual.values(), kw.values(), ctx.day_mask(), eps);
    ++attempts;
    if (!best_report || rep.mape < best_report->mape) {
      best_report = rep;
      best_forecast = std::move(kw);
      best_seed = ncfg.seed;
    }
    errors.e_n = best_report->mape;
    if (target_condition(errors)) break;
  }
  errors.target_met = target_condition(errors);

  CaseResult result{.case_id = case_id,
                    .weather = base.weather,
                    .per_level_reports = {*best_report},
                    .levels_used = levels_used,
                    .forecast = *best_forecast,
                    .level_forecasts = {},
                    .seed = best_seed,
                    .errors = errors,
                    .attempts = attempts,
                    .narx_input_width = set.width,
                    .selected_level = best.level};
  return DayAheadResult{*best_forecast, errors, std::move(result)};
}

DayAheadResult forecast_day_ahead(const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                                  const LevelSet& levels_used, std::size_t forecast_day,
                                  const PipelineConfig& config) {
  DayContext ctx(dataset, profile, forecast_day, config);
  CaseId id = CaseId::Case2;
  for (auto c : {CaseId::Case2, CaseId::Case3, CaseId::Case4}) {
    if (case_levels(c) == levels_used) id = c;
  }
  return forecast_day_ahead(ctx, levels_used, id);
}

CaseResult run_case(CaseId id, DayContext& ctx) {
  if (id == CaseId::Case1) return ctx.baseline();
  return forecast_day_ahead(ctx, case_levels(id), id).result;
}

CaseResult run_case(CaseId id, const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                    std::size_t forecast_day, const PipelineConfig& config) {
  DayContext ctx(dataset, profile, forecast_day, config);
  return run_case(id, ctx);
}

// ---- case comparison ---------------------------------------------------------

double reduction_pct(double baseline, double value) { return 100.0 * (baseline - value) / baseline; }

double ComparisonRow::reduction_vs_case1_pct() const { return reduction_pct(case1_min_mape, case2_mape); }
double ComparisonRow::reduction_vs_case3_pct() const { return reduction_pct(case3_mape, case2_mape); }
double ComparisonRow::reduction_vs_case4_pct() const { return reduction_pct(case4_mape, case2_mape); }

ComparisonTable compare_cases(const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                              const std::vector<std::size_t>& days, const PipelineConfig& config) {
  // Best match per class: the sunniest sunny day, the darkest cloudy day and
  // the partly cloudy day closest to the middle of the band.
  const double mid = 0.5 * (config.sunny_threshold + config.cloudy_threshold);
  std::array<std::optional<std::pair<std::size_t, double>>, 3> pick;
  for (std::size_t day : days) {
    DayContext probe(dataset, profile, day, config);
    const auto idx = probe.actual_day_index(config.target_level);
    if (idx.empty()) continue;
    const Weather w = classify_weather_day(idx, config.sunny_threshold, config.cloudy_threshold);
    double mean = 0.0;
    for (double v : idx) mean += v;
    mean /= static_cast<double>(idx.size());
    const double score = w == Weather::Sunny ? -mean : w == Weather::Cloudy ? mean : std::abs(mean - mid);
    auto& slot = pick[static_cast<std::size_t>(w)];
    const double slot_score = !slot ? 0.0
                              : w == Weather::Sunny ? -slot->second
                              : w == Weather::Cloudy ? slot->second
                                                     : std::abs(slot->second - mid);
    if (!slot || score < slot_score) slot = std::make_pair(day, mean);
  }

  ComparisonTable table;
  for (auto w : kAllWeather) {
    const auto& slot = pick[static_cast<std::size_t>(w)];
    if (!slot) {
      table.missing.push_back(w);
      continue;
    }
    DayContext ctx(dataset, profile, slot->first, config);
    ComparisonRow row;
    row.weather = w;
    row.day = slot->first;
    row.mean_index = slot->second;
    for (auto id : {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4}) {
      row.cases.push_back(run_case(id, ctx));
      row.cases.back().weather = w;
    }
    row.case1_min_mape = row.cases[0].mape();
    row.case2_mape = row.cases[1].mape();
    row.case3_mape = row.cases[2].mape();
    row.case4_mape = row.cases[3].mape();
    row.target_met = row.cases[1].errors->target_met;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace pvfc::pipeline
