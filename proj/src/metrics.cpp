#include "pvfc/metrics.hpp"

#include <cmath>
#include <string>

namespace pvfc::metrics {

namespace {

// Neumaier's variant of compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_pair(std::span<const double> a, std::span<const double> f, std::size_t min_len) {
  if (a.size() != f.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "actual has " + std::to_string(a.size()) + " values, forecast " + std::to_string(f.size()));
  }
  if (a.size() < min_len) {
    throw Error(ErrorCode::LengthMismatch, "need at least " + std::to_string(min_len) + " values");
  }
}

double mean(std::span<const double> a) {
  CompensatedSum s;
  for (double v : a) s.add(v);
  return s.value() / static_cast<double>(a.size());
}

}  // namespace

MapeResult mape(std::span<const double> actual, std::span<const double> forecast, double epsilon_kw) {
  require_pair(actual, forecast, 1);
  if (!(epsilon_kw >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon_kw must be >= 0");
  CompensatedSum s;
  std::size_t used = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    // a == 0 with epsilon 0 would divide by zero; it is excluded like any sub-epsilon hour.
    if (actual[i] < epsilon_kw || actual[i] == 0.0) continue;
    s.add(std::abs((actual[i] - forecast[i]) / actual[i]));
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::AllExcluded, "no actual value >= epsilon");
  return {s.value() / static_cast<double>(used), actual.size() - used};
}

double rmse(std::span<const double> actual, std::span<const double> forecast) {
  require_pair(actual, forecast, 1);
  CompensatedSum s;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - forecast[i];
    s.add(e * e);
  }
  return std::sqrt(s.value() / static_cast<double>(actual.size()));
}

double r_squared(std::span<const double> actual, std::span<const double> forecast) {
  require_pair(actual, forecast, 2);
  const double m = mean(actual);
  CompensatedSum res;
  CompensatedSum tot;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - forecast[i];
    const double d = actual[i] - m;
    res.add(e * e);
    tot.add(d * d);
  }
  if (tot.value() == 0.0) throw Error(ErrorCode::ConstantActual, "SS_tot is zero");
  return 1.0 - res.value() / tot.value();
}

MetricReport report(std::span<const double> actual, std::span<const double> forecast, double epsilon_kw,
                    ReportMode mode) {
  MetricReport r;
  const auto m = mape(actual, forecast, epsilon_kw);
  r.mape = m.value;
  r.n_excluded = m.n_excluded;
  r.n_used = actual.size() - m.n_excluded;
  r.rmse = rmse(actual, forecast);
  r.mean_actual = mean(actual);
  try {
    r.r_squared = r_squared(actual, forecast);
  } catch (const Error& e) {
    if (mode == ReportMode::Strict || e.code() != ErrorCode::ConstantActual) throw;
  }
  return r;
}

}  // namespace pvfc::metrics
