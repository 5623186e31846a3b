#include "pvfc/narnet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pvfc/error.hpp"
#include "pvfc/metrics.hpp"
#include "pvfc/random.hpp"

namespace pvfc {

namespace narnet {

void NetworkConfig::validate() const {
  if (delay_d < 1) throw Error(ErrorCode::InvalidArgument, "delay_d must be >= 1");
  if (hidden_width < 1) throw Error(ErrorCode::InvalidArgument, "hidden_width must be >= 1");
  if (!(step_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_size must be > 0");
  if (!(early_stop_delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "early_stop_delta must be > 0");
}

NarxModel::NarxModel(NetworkConfig config, std::vector<double> params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  if (params_.size() != config_.layout().parameter_count()) {
    throw Error(ErrorCode::DimensionMismatch, "parameter vector has " + std::to_string(params_.size()) +
                                                  " entries, layout needs " +
                                                  std::to_string(config_.layout().parameter_count()));
  }
  for (double v : params_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite network parameter");
  }
}

NarxModel init_network(const NetworkConfig& config) {
  config.validate();
  const auto L = config.layout();
  std::vector<double> p(L.parameter_count(), 0.0);
  Rng rng(substream_seed(config.seed, {0x4e4554}));
  const double hidden_bound = std::sqrt(6.0 / static_cast<double>(L.input_width + L.hidden_width));
  for (std::size_t k = 0; k < L.hidden_width * L.input_width; ++k) {
    p[L.w_hidden_offset() + k] = rng.uniform(-hidden_bound, hidden_bound);
  }
  const double out_bound = std::sqrt(6.0 / static_cast<double>(L.hidden_width + 1));
  for (std::size_t j = 0; j < L.hidden_width; ++j) p[L.w_out_offset() + j] = rng.uniform(-out_bound, out_bound);
  return NarxModel(config, std::move(p));
}

double forward(const NarxModel& model, std::span<const double> input) {
  if (input.size() != model.config().input_width()) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(input.size()) +
                                                  " values, network expects " +
                                                  std::to_string(model.config().input_width()));
  }
  return kernels::forward(model.layout(), model.params(), input);
}

namespace {

void fill_row(double* row, std::span<const double> y, const std::vector<Channel>& exo, std::size_t t,
              std::size_t d) {
  std::size_t k = 0;
  for (const auto& x : exo) {
    for (std::size_t lag = 1; lag <= d; ++lag) row[k++] = x[t - lag];
  }
  for (std::size_t lag = 1; lag <= d; ++lag) row[k++] = y[t - lag];
}

void require_series(std::span<const double> y, const std::vector<Channel>& exo, std::size_t d) {
  if (y.size() <= d) {
    throw Error(ErrorCode::TooShort, "series of length " + std::to_string(y.size()) +
                                         " needs more than d=" + std::to_string(d) + " values");
  }
  for (const auto& x : exo) {
    if (x.size() != y.size()) {
      throw Error(ErrorCode::TooShort, "exogenous channel length differs from target length");
    }
  }
}

}  // namespace

TrainingSet make_training_set(std::span<const double> y, const std::vector<Channel>& exo, std::size_t d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be >= 1");
  require_series(y, exo, d);
  TrainingSet set;
  set.width = d * (1 + exo.size());
  const std::size_t n = y.size() - d;
  set.inputs.resize(n * set.width);
  set.targets.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t = s + d;
    fill_row(set.inputs.data() + s * set.width, y, exo, t, d);
    set.targets[s] = y[t];
  }
  return set;
}

LossGradient loss_and_gradient(const NarxModel& model, const TrainingSet& batch) {
  if (batch.size() == 0) throw Error(ErrorCode::EmptyBatch, "no training samples");
  if (batch.width != model.config().input_width()) {
    throw Error(ErrorCode::DimensionMismatch, "batch width differs from network input width");
  }
  LossGradient out;
  out.gradient.resize(model.layout().parameter_count());
  out.loss = kernels::mse_gradient(model.layout(), model.params(), batch.inputs, batch.targets, out.gradient);
  return out;
}

NarxModel train(const NarxModel& model, const TrainingSet& batch, const NetworkConfig& config) {
  if (config.max_epochs == 0) return model;
  if (batch.size() == 0) throw Error(ErrorCode::EmptyBatch, "no training samples");
  if (batch.width != model.config().input_width()) {
    throw Error(ErrorCode::DimensionMismatch, "batch width differs from network input width");
  }
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  NarxModel current = model;
  current.training_history.clear();
  const auto layout = current.layout();
  const std::size_t P = layout.parameter_count();
  std::vector<double> m(P, 0.0), v(P, 0.0), grad(P, 0.0);
  std::vector<double> best_params(current.params().begin(), current.params().end());
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_improvement = 0;
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double loss = kernels::mse_gradient(layout, current.params(), batch.inputs, batch.targets, grad);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::DivergedLoss, "loss became non-finite at epoch " + std::to_string(epoch));
    }
    current.training_history.push_back(loss);
    const bool improved = loss < best_loss - config.early_stop_delta;
    if (loss < best_loss) {
      best_loss = loss;
      best_params.assign(current.params().begin(), current.params().end());
    }
    if (improved) {
      since_improvement = 0;
    } else if (++since_improvement >= config.early_stop_patience) {
      break;
    }

    beta1_t *= beta1;
    beta2_t *= beta2;
    auto params = current.mutable_params();
    for (std::size_t k = 0; k < P; ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
      const double m_hat = m[k] / (1.0 - beta1_t);
      const double v_hat = v[k] / (1.0 - beta2_t);
      params[k] -= config.step_size * m_hat / (std::sqrt(v_hat) + eps);
    }
  }

  std::copy(best_params.begin(), best_params.end(), current.mutable_params().begin());
  current.trained = true;
  return current;
}

std::vector<double> predict_open_loop(const NarxModel& model, std::span<const double> y,
                                      const std::vector<Channel>& exo) {
  const std::size_t d = model.config().delay_d;
  if (exo.size() != model.config().n_exo_channels) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.config().n_exo_channels) +
                                                  " exogenous channels, got " + std::to_string(exo.size()));
  }
  const TrainingSet set = make_training_set(y, exo, d);
  std::vector<double> out(set.size());
  kernels::forward_batch(model.layout(), model.params(), set.inputs, out);
  return out;
}

ClosedLoopResult predict_closed_loop(const NarxModel& model, std::span<const double> y_seed,
                                     const std::vector<Channel>& exo_seed,
                                     const std::vector<Channel>& exo_future, std::size_t horizon,
                                     double kappa_max) {
  const std::size_t d = model.config().delay_d;
  const std::size_t k = model.config().n_exo_channels;
  if (y_seed.size() != d) {
    throw Error(ErrorCode::SeedLengthMismatch,
                "seed has " + std::to_string(y_seed.size()) + " values, d=" + std::to_string(d));
  }
  if (exo_seed.size() != k || exo_future.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "exogenous channel count differs from model");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (exo_seed[c].size() != d) throw Error(ErrorCode::SeedLengthMismatch, "exogenous seed length != d");
    if (exo_future[c].size() < horizon) {
      throw Error(ErrorCode::SeedLengthMismatch, "exogenous future shorter than horizon");
    }
  }

  // Working histories: seed followed by the horizon.
  std::vector<double> y(y_seed.begin(), y_seed.end());
  y.reserve(d + horizon);
  std::vector<Channel> x(k);
  for (std::size_t c = 0; c < k; ++c) {
    x[c] = exo_seed[c];
    x[c].insert(x[c].end(), exo_future[c].begin(),
                exo_future[c].begin() + static_cast<std::ptrdiff_t>(horizon));
  }

  ClosedLoopResult out;
  out.values.reserve(horizon);
  std::vector<double> row(model.config().input_width());
  for (std::size_t h = 0; h < horizon; ++h) {
    fill_row(row.data(), y, x, d + h, d);
    double pred = kernels::forward(model.layout(), model.params(), row);
    if (!(pred >= 0.0) || pred > kappa_max) {
      ++out.clamp_count;
      pred = std::isnan(pred) ? 0.0 : std::clamp(pred, 0.0, kappa_max);
    }
    out.values.push_back(pred);
    y.push_back(pred);
  }
  return out;
}

FittingModel fit_nar(const preprocess::PreprocessedSeries& series, NetworkConfig config,
                     MeasurementLevel level) {
  if (series.source_n < kMinUsableHours) {
    throw Error(ErrorCode::InsufficientHistory, "fitting needs at least 30 days of history");
  }
  config.n_exo_channels = 0;
  const auto& y = series.index_values;
  const TrainingSet set = make_training_set(y, {}, config.delay_d);
  FittingModel fm{level, train(init_network(config), set, config), 0.0, 0.0};
  const auto pred = predict_open_loop(fm.net, y, {});
  std::span<const double> actual(y.data() + config.delay_d, pred.size());
  fm.fit_r2 = metrics::r_squared(actual, pred);
  fm.fit_mape = metrics::mape(actual, pred, kFitMapeEpsilon).value;
  return fm;
}

// ---- serialization -------------------------------------------------------

namespace {

constexpr const char* kMagic = "pvfc-narx";
constexpr int kFormatVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' in model file");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "bad integer '" + s + "' in model file");
  }
  return v;
}

std::string expect_key(std::istream& in, const char* key) {
  std::string k, value;
  if (!(in >> k >> value) || k != key) {
    throw Error(ErrorCode::ParseError, std::string("model file: expected '") + key + "'");
  }
  return value;
}

std::vector<double> read_list(std::istream& in, const char* key) {
  const auto n = parse_u64(expect_key(in, key));
  std::vector<double> v;
  v.reserve(n);
  std::string tok;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!(in >> tok)) throw Error(ErrorCode::ParseError, std::string("model file: truncated ") + key);
    v.push_back(parse_double(tok));
  }
  return v;
}

}  // namespace

void save_model(const NarxModel& model, std::ostream& out) {
  const auto& c = model.config();
  out << kMagic << ' ' << kFormatVersion << '\n'
      << "delay_d " << c.delay_d << '\n'
      << "hidden_width " << c.hidden_width << '\n'
      << "n_exo_channels " << c.n_exo_channels << '\n'
      << "seed " << c.seed << '\n'
      << "max_epochs " << c.max_epochs << '\n'
      << "step_size " << fmt17(c.step_size) << '\n'
      << "early_stop_patience " << c.early_stop_patience << '\n'
      << "early_stop_delta " << fmt17(c.early_stop_delta) << '\n'
      << "trained " << (model.trained ? 1 : 0) << '\n'
      << "history " << model.training_history.size() << '\n';
  for (double v : model.training_history) out << fmt17(v) << '\n';
  out << "params " << model.params().size() << '\n';
  for (double v : model.params()) out << fmt17(v) << '\n';
}

NarxModel load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw Error(ErrorCode::ParseError, "not a pvfc model file");
  }
  if (version != kFormatVersion) {
    throw Error(ErrorCode::ParseError, "unsupported model format version " + std::to_string(version));
  }
  NetworkConfig c;
  c.delay_d = parse_u64(expect_key(in, "delay_d"));
  c.hidden_width = parse_u64(expect_key(in, "hidden_width"));
  c.n_exo_channels = parse_u64(expect_key(in, "n_exo_channels"));
  c.seed = parse_u64(expect_key(in, "seed"));
  c.max_epochs = parse_u64(expect_key(in, "max_epochs"));
  c.step_size = parse_double(expect_key(in, "step_size"));
  c.early_stop_patience = parse_u64(expect_key(in, "early_stop_patience"));
  c.early_stop_delta = parse_double(expect_key(in, "early_stop_delta"));
  const bool trained = parse_u64(expect_key(in, "trained")) != 0;
  auto history = read_list(in, "history");
  auto params = read_list(in, "params");
  NarxModel model(c, std::move(params));
  model.trained = trained;
  model.training_history = std::move(history);
  return model;
}

std::string to_text(const NarxModel& model) {
  std::ostringstream os;
  save_model(model, os);
  return os.str();
}

NarxModel from_text(const std::string& text) {
  std::istringstream is(text);
  return load_model(is);
}

}  // namespace narnet
}  // namespace pvfc
