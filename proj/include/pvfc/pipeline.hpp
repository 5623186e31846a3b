#pragma once

// Multi-level day-ahead forecasting: per-level fitting models, R^2 selection,
// NARX fusion over the selected levels, and the four case studies.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "pvfc/clearsky.hpp"
#include "pvfc/core_model.hpp"
#include "pvfc/metrics.hpp"
#include "pvfc/narnet.hpp"
#include "pvfc/preprocess.hpp"

namespace pvfc::pipeline {

enum class CaseId { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

std::string_view to_string(CaseId id);

using LevelSet = std::set<MeasurementLevel>;

/// Levels fed to the NARX in each case; Case1 uses none.
LevelSet case_levels(CaseId id);

struct PipelineConfig {
  narnet::NetworkConfig network;
  preprocess::Options prep;
  MeasurementLevel target_level = MeasurementLevel::Customer;
  /// MAPE exclusion threshold as a fraction of the evaluated level's ac rating.
  double epsilon_fraction = 0.01;
  std::size_t max_retries = 5;
  double sunny_threshold = 0.8;
  double cloudy_threshold = 0.4;
  /// Nameplate of each level relative to the dataset's SiteConfig, in
  /// Customer/Feeder/Substation order.
  std::array<double, 3> level_scale = {1.0, 1.0, 1.0};
  std::uint64_t seed = 1;

  SiteConfig level_site(const SiteConfig& site, MeasurementLevel level) const {
    return site.scaled(level_scale[level_index(level)]);
  }
};

struct LevelErrors {
  double e_c = 0.0;
  double e_f = 0.0;
  double e_s = 0.0;
  std::optional<double> e_n;
  bool target_met = false;

  double baseline_min() const;
};

/// The Fig.-2 acceptance condition.
bool target_condition(const LevelErrors& e);

struct CaseResult {
  CaseId case_id = CaseId::Case1;
  Weather weather = Weather::PartlyCloudy;
  /// Case1: one report per level in C, F, S order. Cases 2-4: the target's report.
  std::vector<metrics::MetricReport> per_level_reports;
  LevelSet levels_used;
  /// Forecast of the target level over the forecast day (24 h).
  HourlyPowerSeries forecast;
  /// Case1 only: forecasts of every level, C, F, S order.
  std::vector<HourlyPowerSeries> level_forecasts;
  std::uint64_t seed = 0;
  std::optional<LevelErrors> errors;
  std::size_t attempts = 0;
  std::size_t narx_input_width = 0;
  std::optional<MeasurementLevel> selected_level;

  double mape() const;
};

narnet::FittingModel select_best_fitting(const std::vector<narnet::FittingModel>& models);

Weather classify_weather_day(std::span<const double> day_index_values, double sunny_threshold = 0.8,
                             double cloudy_threshold = 0.4);

/// Everything derived from the history preceding one forecast day. Building
/// it is the expensive part; it is shared by all cases for that day.
class DayContext {
 public:
  DayContext(const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
             std::size_t forecast_day, const PipelineConfig& config);

  std::size_t forecast_day() const { return day_; }
  std::size_t history_hours() const { return day_ * 24; }
  const PipelineConfig& config() const { return config_; }
  const MultiLevelDataset& dataset() const { return dataset_; }

  const clearsky::ClearSkyProfile& level_profile(MeasurementLevel l) const { return profiles_[level_index(l)]; }
  clearsky::ClearSkyProfile history_profile(MeasurementLevel l) const;
  clearsky::ClearSkyProfile day_profile(MeasurementLevel l) const;
  const preprocess::PreprocessedSeries& history(MeasurementLevel l) const { return history_[level_index(l)]; }
  HourlyPowerSeries actual_day(MeasurementLevel l) const;

  /// Day mask of the forecast day and its day-hour count.
  const std::vector<bool>& day_mask() const { return day_mask_; }
  std::size_t horizon() const;

  /// Measured clear-sky index of `l` over the forecast day's day hours.
  std::vector<double> actual_day_index(MeasurementLevel l) const;

  double epsilon_kw(MeasurementLevel l) const;

  /// Per-level fitting models for `levels` (trained on demand, cached), C-F-S order.
  std::vector<narnet::FittingModel> fitting_models(const LevelSet& levels);

  /// Case 1 result (cached).
  const CaseResult& baseline();

 private:
  const MultiLevelDataset& dataset_;
  PipelineConfig config_;
  std::size_t day_;
  std::array<clearsky::ClearSkyProfile, 3> profiles_;
  std::array<preprocess::PreprocessedSeries, 3> history_;
  std::vector<bool> day_mask_;
  std::array<std::optional<narnet::FittingModel>, 3> fits_;
  std::optional<CaseResult> baseline_;
};

std::vector<narnet::FittingModel> build_fitting_models(const MultiLevelDataset& dataset,
                                                       const clearsky::ClearSkyProfile& profile,
                                                       std::size_t forecast_day, const PipelineConfig& config);

struct DayAheadResult {
  HourlyPowerSeries forecast;
  LevelErrors errors;
  CaseResult result;
};

DayAheadResult forecast_day_ahead(DayContext& ctx, const LevelSet& levels_used, CaseId case_id);

DayAheadResult forecast_day_ahead(const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                                  const LevelSet& levels_used, std::size_t forecast_day,
                                  const PipelineConfig& config);

CaseResult run_case(CaseId id, DayContext& ctx);
CaseResult run_case(CaseId id, const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                    std::size_t forecast_day, const PipelineConfig& config);

struct ComparisonRow {
  Weather weather = Weather::Sunny;
  std::size_t day = 0;
  double mean_index = 0.0;
  double case1_min_mape = 0.0;
  double case2_mape = 0.0;
  double case3_mape = 0.0;
  double case4_mape = 0.0;
  bool target_met = false;
  std::vector<CaseResult> cases;  ///< Case1..Case4

  double reduction_vs_case1_pct() const;
  double reduction_vs_case3_pct() const;
  double reduction_vs_case4_pct() const;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  ///< Sunny, Cloudy, PartlyCloudy order, present classes only
  std::vector<Weather> missing;
};

/// 100 * (baseline - value) / baseline
double reduction_pct(double baseline, double value);

/// Classifies every candidate day, keeps the best-matching day per class and
/// runs all four cases on it.
ComparisonTable compare_cases(const MultiLevelDataset& dataset, const clearsky::ClearSkyProfile& profile,
                              const std::vector<std::size_t>& days, const PipelineConfig& config);

}  // namespace pvfc::pipeline
