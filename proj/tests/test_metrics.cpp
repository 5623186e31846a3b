#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pvfc/error.hpp"
#include "pvfc/metrics.hpp"

using namespace pvfc;
using namespace pvfc::metrics;
using V = std::vector<double>;

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

double rel(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

}  // namespace

TEST_CASE("MAPE hand cases") {
  CHECK(mape(V{100, 200}, V{100, 200}, 0.0).value == 0.0);
  CHECK(std::fabs(mape(V{100, 200}, V{110, 190}, 0.0).value - 0.075) < 1e-12);
  const auto r = mape(V{0, 100}, V{5, 100}, 1.0);
  CHECK(r.value == 0.0);
  CHECK(r.n_excluded == 1);
  // A zero actual is excluded even with epsilon 0.
  CHECK(mape(V{0, 100}, V{5, 90}, 0.0).n_excluded == 1);
  CHECK(code_of([] { mape(V{0.5, 0.2}, V{1, 1}, 1.0); }) == ErrorCode::AllExcluded);
  CHECK(code_of([] { mape(V{1, 2}, V{1}, 0.0); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("RMSE hand cases") {
  CHECK(rmse(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
  CHECK(std::fabs(rmse(V{3, 4}, V{0, 0}) - std::sqrt(12.5)) < 1e-12);
  CHECK(std::fabs(rmse(V{6, 8}, V{0, 0}) - 7.0711) < 1e-4);
  CHECK(code_of([] { rmse(V{1, 2}, V{1}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { rmse(V{}, V{}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("R squared hand cases") {
  CHECK(r_squared(V{1, 2, 3}, V{1, 2, 3}) == 1.0);
  CHECK(r_squared(V{1, 2, 3}, V{2, 2, 2}) == 0.0);
  CHECK(std::fabs(r_squared(V{1, 2, 3}, V{1.5, 2, 2.5}) - 0.75) < 1e-12);
  CHECK(r_squared(V{1, 2, 3}, V{3, 2, 1}) < 0.0);
  CHECK(code_of([] { r_squared(V{2, 2, 2}, V{1, 2, 3}); }) == ErrorCode::ConstantActual);
  CHECK(code_of([] { r_squared(V{2}, V{2}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("report bundles the metrics") {
  const auto perfect = report(V{1, 2, 3}, V{1, 2, 3}, 0.0);
  CHECK(perfect.mape == 0.0);
  CHECK(perfect.rmse == 0.0);
  CHECK(*perfect.r_squared == 1.0);
  CHECK(perfect.n_used == 3);
  CHECK(perfect.mean_actual == doctest::Approx(2.0));

  const auto r = report(V{100, 200}, V{110, 190}, 0.0);
  CHECK(std::fabs(r.mape - 0.075) < 1e-12);
  CHECK(r.n_used + r.n_excluded == 2);

  CHECK(code_of([] { report(V{5, 5}, V{4, 6}, 0.0); }) == ErrorCode::ConstantActual);
  const auto partial = report(V{5, 5}, V{4, 6}, 0.0, ReportMode::Partial);
  CHECK_FALSE(partial.r_squared.has_value());
  CHECK(partial.mape == doctest::Approx(0.2));
  CHECK(partial.rmse == doctest::Approx(1.0));

  const auto excl = report(V{0, 100, 50}, V{3, 90, 50}, 1.0);
  CHECK(excl.n_excluded == 1);
  CHECK(excl.n_used == 2);
}

TEST_CASE("metrics match naive oracles on random vectors") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::size_t> len(2, 1000);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::normal_distribution<double> noise(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(gen);
    V a(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = val(gen);
      f[i] = a[i] + noise(gen);
    }
    a[0] = 0.5;  // one hour below epsilon
    CHECK(rel(mape(a, f, 1.0).value, oracle::mape(a, f, 1.0)) < 1e-10);
    CHECK(rel(rmse(a, f), oracle::rmse(a, f)) < 1e-10);
    CHECK(rel(r_squared(a, f), oracle::r_squared(a, f)) < 1e-10);
  }
}

TEST_CASE("metric invariances") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> val(1.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    V a(64), f(64);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = val(gen);
      f[i] = val(gen);
    }
    for (double k : {2.0, 0.1, 1000.0}) {
      V ka(a), kf(f);
      for (auto& v : ka) v *= k;
      for (auto& v : kf) v *= k;
      CHECK(std::fabs(mape(ka, kf, 0.0).value - mape(a, f, 0.0).value) < 1e-12);
      CHECK(rel(rmse(ka, kf), k * rmse(a, f)) < 1e-12);
    }
    V sa(a), sf(f);
    for (auto& v : sa) v += 37.0;
    for (auto& v : sf) v += 37.0;
    CHECK(std::fabs(r_squared(sa, sf) - r_squared(a, f)) < 1e-9);

    double mean = 0.0;
    for (double v : a) mean += v;
    mean /= static_cast<double>(a.size());
    CHECK(std::fabs(r_squared(a, V(a.size(), mean))) < 1e-12);
    CHECK(r_squared(a, f) <= 1.0);
  }
}

TEST_CASE("long sums stay accurate") {
  // 1e6 hours: compensated summation keeps the RMSE of a constant error exact.
  V a(1'000'000, 10.0), f(1'000'000, 10.1);
  CHECK(rel(rmse(a, f), 0.1) < 1e-12);
  CHECK(rel(mape(a, f, 0.0).value, 0.01) < 1e-12);
}
