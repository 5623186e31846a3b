#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "pvfc/error.hpp"

namespace pvfc::metrics {

struct MapeResult {
  double value = 0.0;  ///< fraction, not percent
  std::size_t n_excluded = 0;
};

/// Mean absolute percentage error over hours with actual >= epsilon_kw.
/// Throws AllExcluded if no hour qualifies.
MapeResult mape(std::span<const double> actual, std::span<const double> forecast, double epsilon_kw);

double rmse(std::span<const double> actual, std::span<const double> forecast);

/// Coefficient of determination, 1 - SS_res / SS_tot. Throws ConstantActual when SS_tot == 0.
double r_squared(std::span<const double> actual, std::span<const double> forecast);

struct MetricReport {
  double mape = 0.0;
  double rmse = 0.0;
  /// Absent only in partial mode when the actual vector is constant.
  std::optional<double> r_squared;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
  double mean_actual = 0.0;
};

enum class ReportMode { Strict, Partial };

/// Bundles the three metrics. In Partial mode a ConstantActual failure leaves
/// r_squared empty instead of throwing.
MetricReport report(std::span<const double> actual, std::span<const double> forecast, double epsilon_kw,
                    ReportMode mode = ReportMode::Strict);

}  // namespace pvfc::metrics
