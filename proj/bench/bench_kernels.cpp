#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pvfc/clearsky.hpp"
#include "pvfc/kernels.hpp"

using namespace pvfc;

namespace {

struct Batch {
  kernels::Layout layout;
  std::vector<double> params, inputs, targets, gradient, outputs;

  Batch(std::size_t width, std::size_t hidden, std::size_t n) : layout{width, hidden} {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    params.resize(layout.parameter_count());
    for (double& p : params) p = u(gen);
    inputs.resize(n * width);
    for (double& x : inputs) x = u(gen);
    targets.resize(n);
    for (double& t : targets) t = u(gen);
    gradient.resize(params.size());
    outputs.resize(n);
  }
};

// Widths of Case2 at d = 12 (four channels) and hidden width 10.
constexpr std::size_t kWidth = 60;
constexpr std::size_t kHidden = 10;

void BM_MseGradient(benchmark::State& state) {
  Batch b(kWidth, kHidden, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::mse_gradient(b.layout, b.params, b.inputs, b.targets, b.gradient));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MseGradientSerial(benchmark::State& state) {
  Batch b(kWidth, kHidden, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::mse_gradient_serial(b.layout, b.params, b.inputs, b.targets, b.gradient));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardBatch(benchmark::State& state) {
  Batch b(kWidth, kHidden, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::forward_batch(b.layout, b.params, b.inputs, b.outputs);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardBatchSerial(benchmark::State& state) {
  Batch b(kWidth, kHidden, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::forward_batch_serial(b.layout, b.params, b.inputs, b.outputs);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ClearSkyProfile(benchmark::State& state) {
  const SiteConfig site;
  const auto start = UtcHour::from_civil(2016, 1, 1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clearsky::clearsky_profile(site, start, static_cast<std::size_t>(state.range(0))));
  }
}

void BM_ClearSkyProfileSerial(benchmark::State& state) {
  const SiteConfig site;
  const auto start = UtcHour::from_civil(2016, 1, 1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clearsky::clearsky_profile_serial(site, start, static_cast<std::size_t>(state.range(0))));
  }
}

}  // namespace

BENCHMARK(BM_MseGradient)->Arg(1024)->Arg(8192);
BENCHMARK(BM_MseGradientSerial)->Arg(1024)->Arg(8192);
BENCHMARK(BM_ForwardBatch)->Arg(1024)->Arg(8192);
BENCHMARK(BM_ForwardBatchSerial)->Arg(1024)->Arg(8192);
BENCHMARK(BM_ClearSkyProfile)->Arg(24 * 366);
BENCHMARK(BM_ClearSkyProfileSerial)->Arg(24 * 366);

BENCHMARK_MAIN();
