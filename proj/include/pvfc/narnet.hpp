#pragma once

// Tapped-delay feedforward network: NAR when there are no exogenous channels,
// NARX otherwise. One tanh hidden layer and a linear output.
//
// Input vector layout for a sample at time t (fixed, serialized models rely on it):
//   [x_1(t-1) .. x_1(t-d), ..., x_k(t-1) .. x_k(t-d), y(t-1) .. y(t-d)]

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pvfc/core_model.hpp"
#include "pvfc/kernels.hpp"
#include "pvfc/preprocess.hpp"

namespace pvfc::narnet {

using Channel = std::vector<double>;

struct NetworkConfig {
  std::size_t delay_d = 12;
  std::size_t hidden_width = 10;
  std::size_t n_exo_channels = 0;
  std::uint64_t seed = 1;
  std::size_t max_epochs = 2000;
  double step_size = 1e-2;
  std::size_t early_stop_patience = 50;
  double early_stop_delta = 1e-9;

  std::size_t input_width() const { return delay_d * (1 + n_exo_channels); }
  kernels::Layout layout() const { return {input_width(), hidden_width}; }
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

class NarxModel {
 public:
  NarxModel(NetworkConfig config, std::vector<double> params);

  const NetworkConfig& config() const { return config_; }
  kernels::Layout layout() const { return config_.layout(); }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }

  double w_hidden(std::size_t j, std::size_t i) const {
    return params_[layout().w_hidden_offset() + j * config_.input_width() + i];
  }
  double b_hidden(std::size_t j) const { return params_[layout().b_hidden_offset() + j]; }
  double w_out(std::size_t j) const { return params_[layout().w_out_offset() + j]; }
  double b_out() const { return params_[layout().b_out_offset()]; }

  bool trained = false;
  std::vector<double> training_history;

  friend bool operator==(const NarxModel&, const NarxModel&) = default;

 private:
  NetworkConfig config_;
  std::vector<double> params_;
};

/// Training pairs; `inputs` is row-major (size() x width).
struct TrainingSet {
  std::size_t width = 0;
  std::vector<double> inputs;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
  std::span<const double> row(std::size_t s) const { return {inputs.data() + s * width, width}; }
};

/// Uniform Glorot-style weights within +-sqrt(6 / (fan_in + fan_out)), zero biases.
NarxModel init_network(const NetworkConfig& config);

/// Throws DimensionMismatch if `input` is not input_width() long.
double forward(const NarxModel& model, std::span<const double> input);

/// L - d samples; throws TooShort unless every series has the same length L > d.
TrainingSet make_training_set(std::span<const double> y, const std::vector<Channel>& exo, std::size_t d);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

LossGradient loss_and_gradient(const NarxModel& model, const TrainingSet& batch);

/// Full-batch adaptive-moment descent with early stopping on the best loss.
/// The returned parameters are those of the best epoch. A zero epoch budget
/// returns the model unchanged.
NarxModel train(const NarxModel& model, const TrainingSet& batch, const NetworkConfig& config);

/// One-step-ahead predictions for t = d .. L-1 from measured lags.
std::vector<double> predict_open_loop(const NarxModel& model, std::span<const double> y,
                                      const std::vector<Channel>& exo);

inline constexpr double kDefaultKappaMax = 1.5;

struct ClosedLoopResult {
  std::vector<double> values;
  std::size_t clamp_count = 0;
};

/// Multi-step recursion feeding predictions back as y lags.
///   y_seed      last d values of y, oldest first
///   exo_seed    per channel, last d observed values, oldest first
///   exo_future  per channel, at least `horizon` values following the seed
/// Every output is clamped to [0, kappa_max].
ClosedLoopResult predict_closed_loop(const NarxModel& model, std::span<const double> y_seed,
                                     const std::vector<Channel>& exo_seed,
                                     const std::vector<Channel>& exo_future, std::size_t horizon,
                                     double kappa_max = kDefaultKappaMax);

struct FittingModel {
  MeasurementLevel level = MeasurementLevel::Customer;
  NarxModel net;
  double fit_r2 = 0.0;
  double fit_mape = 0.0;
};

/// Index-domain epsilon used for the in-sample fitting MAPE.
inline constexpr double kFitMapeEpsilon = 0.01;

/// Trains a NAR on the day-hour index series and scores it in-sample.
FittingModel fit_nar(const preprocess::PreprocessedSeries& series, NetworkConfig config,
                     MeasurementLevel level = MeasurementLevel::Customer);

void save_model(const NarxModel& model, std::ostream& out);
NarxModel load_model(std::istream& in);
std::string to_text(const NarxModel& model);
NarxModel from_text(const std::string& text);

}  // namespace pvfc::narnet
