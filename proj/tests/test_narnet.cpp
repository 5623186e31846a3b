#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pvfc/error.hpp"
#include "pvfc/narnet.hpp"

using namespace pvfc;
using namespace pvfc::narnet;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

NetworkConfig small(std::size_t d, std::size_t hidden, std::size_t exo, std::uint64_t seed = 1) {
  NetworkConfig c;
  c.delay_d = d;
  c.hidden_width = hidden;
  c.n_exo_channels = exo;
  c.seed = seed;
  return c;
}

NarxModel with_params(const NetworkConfig& c, std::vector<double> p) { return NarxModel(c, std::move(p)); }

/// y(t) = 0.3 y(t-1) + 0.6 x(t-1) driven by a smooth bounded input.
std::pair<std::vector<double>, std::vector<double>> linear_process(std::size_t n) {
  std::vector<double> x(n), y(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) x[t] = 0.5 + 0.4 * std::sin(0.37 * t) * std::cos(0.11 * t);
  for (std::size_t t = 1; t < n; ++t) y[t] = 0.3 * y[t - 1] + 0.6 * x[t - 1];
  return {x, y};
}

double r2(const std::vector<double>& a, std::span<const double> f) {
  return oracle::r_squared(a, std::vector<double>(f.begin(), f.end()));
}

}  // namespace

TEST_CASE("config validation and widths") {
  CHECK(small(12, 10, 0).input_width() == 12);
  CHECK(small(2, 3, 4).input_width() == 10);
  CHECK_THROWS_AS(small(0, 10, 0).validate(), Error);
  CHECK_THROWS_AS(small(2, 0, 0).validate(), Error);
  auto c = small(2, 2, 0);
  c.step_size = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("initialization is seeded and bounded") {
  const auto c = small(3, 4, 1, 42);
  const auto a = init_network(c);
  const auto b = init_network(c);
  CHECK(a == b);
  CHECK_FALSE(a.trained);
  CHECK(a.params().size() == c.layout().parameter_count());
  CHECK_FALSE(init_network(small(3, 4, 1, 43)).params()[0] == a.params()[0]);
  const double hidden_bound = std::sqrt(6.0 / (6.0 + 4.0));
  const double out_bound = std::sqrt(6.0 / (4.0 + 1.0));
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::fabs(a.w_hidden(j, i)) <= hidden_bound);
    CHECK(a.b_hidden(j) == 0.0);
    CHECK(std::fabs(a.w_out(j)) <= out_bound);
  }
  CHECK(a.b_out() == 0.0);
}

TEST_CASE("forward hand cases") {
  auto zero = with_params(small(2, 3, 0), std::vector<double>(small(2, 3, 0).layout().parameter_count(), 0.0));
  zero.mutable_params().back() = 0.3;
  CHECK(forward(zero, std::vector<double>{7.0, -2.0}) == 0.3);

  // One hidden unit: w_h = 1, b_h = 0, w_out = 2, b_out = 0.
  const auto one = with_params(small(1, 1, 0), {1.0, 0.0, 2.0, 0.0});
  CHECK(forward(one, std::vector<double>{0.0}) == 0.0);
  CHECK(std::fabs(forward(one, std::vector<double>{5.0}) - 1.99982) < 1e-4);
  CHECK(code_of([&] { forward(one, std::vector<double>{1.0, 2.0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("training set layout") {
  std::vector<double> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = static_cast<double>(i);
  CHECK(make_training_set(y, {}, 2).size() == 8);
  CHECK(make_training_set(y, {}, 2).width == 2);
  const std::vector<Channel> four(4, Channel(10, 1.0));
  const auto wide = make_training_set(y, four, 2);
  CHECK(wide.size() == 8);
  CHECK(wide.width == 10);

  const auto lag1 = make_training_set(std::vector<double>{1, 2, 3, 4}, {}, 1);
  CHECK(lag1.inputs == std::vector<double>{1, 2, 3});
  CHECK(lag1.targets == std::vector<double>{2, 3, 4});

  // Exogenous lags first, then y lags, newest first within each block.
  const auto mixed = make_training_set(std::vector<double>{1, 2, 3}, {Channel{10, 20, 30}}, 2);
  CHECK(mixed.size() == 1);
  CHECK(mixed.inputs == std::vector<double>{20, 10, 2, 1});
  CHECK(mixed.targets == std::vector<double>{3});

  CHECK(code_of([&] { make_training_set(std::vector<double>{1, 2}, {}, 2); }) == ErrorCode::TooShort);
  CHECK(code_of([&] { make_training_set(y, {Channel(9, 0.0)}, 2); }) == ErrorCode::TooShort);
}

TEST_CASE("targets plus the seed rebuild the series") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> y(50);
  for (auto& v : y) v = u(gen);
  const std::size_t d = 4;
  const auto set = make_training_set(y, {}, d);
  std::vector<double> rebuilt(y.begin(), y.begin() + d);
  rebuilt.insert(rebuilt.end(), set.targets.begin(), set.targets.end());
  CHECK(rebuilt == y);
}

TEST_CASE("loss and gradient") {
  const auto c = small(2, 3, 1, 8);
  const auto net = init_network(c);
  TrainingSet empty{c.input_width(), {}, {}};
  CHECK(code_of([&] { loss_and_gradient(net, empty); }) == ErrorCode::EmptyBatch);

  // Targets equal to the model's own outputs: zero loss and gradient.
  TrainingSet exact{c.input_width(), {}, {}};
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    std::vector<double> row(c.input_width());
    for (auto& v : row) v = u(gen);
    exact.inputs.insert(exact.inputs.end(), row.begin(), row.end());
    exact.targets.push_back(forward(net, row));
  }
  const auto lg = loss_and_gradient(net, exact);
  CHECK(lg.loss < 1e-30);
  for (double g : lg.gradient) CHECK(std::fabs(g) < 1e-15);
}

TEST_CASE("single-sample gradient by hand") {
  // One hidden unit, one input: y = v tanh(w u + b) + c, loss = (y - t)^2.
  const double w = 0.2, b = 0.1, v = 0.5, c = -0.05, u = 0.3, t = 0.4;
  const auto net = with_params(small(1, 1, 0), {w, b, v, c});
  const TrainingSet set{1, {u}, {t}};
  const auto lg = loss_and_gradient(net, set);
  const double h = std::tanh(w * u + b);
  const double e = v * h + c - t;
  CHECK(lg.loss == doctest::Approx(e * e).epsilon(1e-14));
  CHECK(lg.gradient[0] == doctest::Approx(2 * e * v * (1 - h * h) * u).epsilon(1e-14));
  CHECK(lg.gradient[1] == doctest::Approx(2 * e * v * (1 - h * h)).epsilon(1e-14));
  CHECK(lg.gradient[2] == doctest::Approx(2 * e * h).epsilon(1e-14));
  CHECK(lg.gradient[3] == doctest::Approx(2 * e).epsilon(1e-14));
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto c = small(2 + trial % 3, 2 + trial, trial % 2, 100 + trial);
    const auto net = init_network(c);
    TrainingSet set{c.input_width(), {}, {}};
    for (int s = 0; s < 30; ++s) {
      for (std::size_t i = 0; i < c.input_width(); ++i) set.inputs.push_back(u(gen));
      set.targets.push_back(u(gen));
    }
    const auto lg = loss_and_gradient(net, set);
    std::vector<double> p(net.params().begin(), net.params().end());
    const auto fd = oracle::fd_gradient(p, c.input_width(), c.hidden_width, set.inputs, set.targets);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      CHECK(std::fabs(lg.gradient[i] - fd[i]) <= 1e-5 * std::max({std::fabs(fd[i]), std::fabs(lg.gradient[i]), 1e-3}));
    }
  }
}

TEST_CASE("training") {
  const auto [x, y] = linear_process(200);
  const auto set = make_training_set(y, {x}, 1);
  auto c = small(1, 4, 1, 3);
  c.max_epochs = 300;
  const auto start = init_network(c);

  const auto a = train(start, set, c);
  const auto b = train(start, set, c);
  CHECK(a.trained);
  CHECK(a == b);
  CHECK(a.training_history == b.training_history);
  CHECK_FALSE(a.training_history.empty());
  CHECK(a.training_history.size() <= c.max_epochs);
  const double best = *std::min_element(a.training_history.begin(), a.training_history.end());
  CHECK(best <= a.training_history.front());
  CHECK(loss_and_gradient(a, set).loss <= loss_and_gradient(start, set).loss);

  auto none = c;
  none.max_epochs = 0;
  CHECK(train(start, set, none) == start);
}

TEST_CASE("early stopping ends training before the cap") {
  const auto [x, y] = linear_process(200);
  const auto set = make_training_set(y, {x}, 1);
  auto c = small(1, 3, 1, 3);
  c.max_epochs = 100000;
  c.early_stop_patience = 5;
  c.early_stop_delta = 1e-3;
  const auto net = train(init_network(c), set, c);
  CHECK(net.training_history.size() < 1000);
}

TEST_CASE("diverging training is reported") {
  const auto [x, y] = linear_process(50);
  auto set = make_training_set(y, {x}, 1);
  for (auto& t : set.targets) t *= 1e300;
  auto c = small(1, 2, 1, 1);
  c.max_epochs = 10;
  CHECK(code_of([&] { train(init_network(c), set, c); }) == ErrorCode::DivergedLoss);
}

TEST_CASE("open-loop prediction") {
  const auto [x, y] = linear_process(40);
  const auto net = init_network(small(3, 4, 1, 9));
  const auto p = predict_open_loop(net, y, {x});
  CHECK(p.size() == y.size() - 3);
  CHECK(p == predict_open_loop(net, y, {x}));
  const auto set = make_training_set(y, {x}, 3);
  for (std::size_t s = 0; s < set.size(); ++s) CHECK(p[s] == forward(net, set.row(s)));
  CHECK(code_of([&] { predict_open_loop(net, std::vector<double>{1, 2, 3}, {Channel{1, 2, 3}}); }) ==
        ErrorCode::TooShort);
}

TEST_CASE("closed-loop prediction") {
  const auto net = init_network(small(2, 3, 1, 4));
  const Channel seed_x{0.1, 0.2};
  const Channel future_x(12, 0.5);
  CHECK(predict_closed_loop(net, std::vector<double>{0.3, 0.4}, {seed_x}, {future_x}, 0).values.empty());
  CHECK(code_of([&] { predict_closed_loop(net, std::vector<double>{0.3}, {seed_x}, {future_x}, 3); }) ==
        ErrorCode::SeedLengthMismatch);
  CHECK(code_of([&] { predict_closed_loop(net, std::vector<double>{0.3, 0.4}, {seed_x}, {Channel(2, 0.0)}, 3); }) ==
        ErrorCode::SeedLengthMismatch);

  // Large weights drive the raw output far outside [0, kappa_max].
  auto wild = net;
  for (auto& p : wild.mutable_params()) p *= 50.0;
  wild.mutable_params().back() = 40.0;
  const auto r = predict_closed_loop(wild, std::vector<double>{0.3, 0.4}, {seed_x}, {future_x}, 12, 1.5);
  CHECK(r.values.size() == 12);
  for (double v : r.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.5);
  }
  CHECK(r.clamp_count > 0);
}

TEST_CASE("closed loop reproduces open loop on an exactly represented process") {
  const auto net = init_network(small(3, 5, 1, 21));
  std::vector<double> x(40), y(40);
  for (std::size_t t = 0; t < 40; ++t) x[t] = 0.5 + 0.3 * std::sin(0.5 * t);
  y[0] = 0.2;
  y[1] = 0.3;
  y[2] = 0.4;
  // Generate y from the network itself, so the network is a perfect model of y.
  for (std::size_t t = 3; t < 40; ++t) {
    std::vector<double> in{x[t - 1], x[t - 2], x[t - 3], y[t - 1], y[t - 2], y[t - 3]};
    y[t] = std::clamp(forward(net, in), 0.0, 1.5);
  }
  const std::size_t h0 = 20;
  const std::vector<double> y_seed(y.begin() + h0 - 3, y.begin() + h0);
  const Channel x_seed(x.begin() + h0 - 3, x.begin() + h0);
  const Channel x_future(x.begin() + h0, x.begin() + h0 + 12);
  const auto closed = predict_closed_loop(net, y_seed, {x_seed}, {x_future}, 12).values;
  const auto open = predict_open_loop(net, y, {x});
  for (std::size_t k = 0; k < 12; ++k) CHECK(std::fabs(closed[k] - y[h0 + k]) < 1e-6);
  for (std::size_t k = 0; k < 12; ++k) {
    if (y[h0 + k] > 0.0 && y[h0 + k] < 1.5) CHECK(std::fabs(open[h0 + k - 3] - closed[k]) < 1e-6);
  }
}

TEST_CASE("learnability of a noise-free linear process") {
  const auto [x, y] = linear_process(501);
  const auto set = make_training_set(y, {x}, 1);
  auto c = small(1, 10, 1, 1);
  c.max_epochs = 2000;
  const auto net = train(init_network(c), set, c);
  CHECK(r2(set.targets, predict_open_loop(net, y, {x})) >= 0.999);
}

TEST_CASE("fit_nar") {
  preprocess::PreprocessedSeries s;
  s.source_n = 24 * 40;
  s.index_values.resize(500);
  s.index_values[0] = 0.6;
  for (std::size_t t = 1; t < s.index_values.size(); ++t) {
    s.index_values[t] = 0.6 + 0.8 * (s.index_values[t - 1] - 0.6) + 0.1 * std::sin(0.3 * t);
  }
  NetworkConfig c = small(12, 10, 0, 5);
  const auto fm = fit_nar(s, c, MeasurementLevel::Feeder);
  CHECK(fm.level == MeasurementLevel::Feeder);
  CHECK(fm.net.config().n_exo_channels == 0);
  CHECK(fm.fit_r2 <= 1.0);
  CHECK(fm.fit_r2 >= 0.999);
  CHECK(fm.fit_mape >= 0.0);

  auto constant = s;
  std::fill(constant.index_values.begin(), constant.index_values.end(), 0.7);
  CHECK(code_of([&] { fit_nar(constant, c); }) == ErrorCode::ConstantActual);

  auto short_history = s;
  short_history.source_n = 24 * 29;
  CHECK(code_of([&] { fit_nar(short_history, c); }) == ErrorCode::InsufficientHistory);
}

TEST_CASE("model text round trip is bit exact") {
  const auto [x, y] = linear_process(100);
  auto c = small(2, 4, 1, 77);
  c.max_epochs = 50;
  c.step_size = 0.003;
  const auto net = train(init_network(c), make_training_set(y, {x}, 2), c);
  const auto text = to_text(net);
  const auto back = from_text(text);
  CHECK(back == net);
  CHECK(to_text(back) == text);
  std::stringstream ss;
  save_model(net, ss);
  CHECK(load_model(ss) == net);
  CHECK_THROWS_AS(from_text("pvfc-narx 2\n"), Error);
  CHECK_THROWS_AS(from_text(text.substr(0, text.size() / 2)), Error);
}
