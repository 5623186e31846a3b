#include "pvfc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pvfc::kernels {

namespace {

// Adds one sample's squared error and its (unscaled) gradient into `grad`.
// `hidden` is scratch of hidden_width values.
double accumulate_sample(const Layout& L, std::span<const double> p, const double* u, double target,
                         double* grad, double* hidden) {
  const std::size_t I = L.input_width;
  const std::size_t H = L.hidden_width;
  const double* W = p.data() + L.w_hidden_offset();
  const double* bh = p.data() + L.b_hidden_offset();
  const double* wo = p.data() + L.w_out_offset();

  double y = p[L.b_out_offset()];
  for (std::size_t j = 0; j < H; ++j) {
    double a = bh[j];
    const double* row = W + j * I;
    for (std::size_t i = 0; i < I; ++i) a += row[i] * u[i];
    hidden[j] = std::tanh(a);
    y += wo[j] * hidden[j];
  }
  const double err = y - target;

  double* gW = grad + L.w_hidden_offset();
  double* gbh = grad + L.b_hidden_offset();
  double* gwo = grad + L.w_out_offset();
  grad[L.b_out_offset()] += err;
  for (std::size_t j = 0; j < H; ++j) {
    gwo[j] += err * hidden[j];
    const double delta = err * wo[j] * (1.0 - hidden[j] * hidden[j]);
    gbh[j] += delta;
    double* grow = gW + j * I;
    for (std::size_t i = 0; i < I; ++i) grow[i] += delta * u[i];
  }
  return err * err;
}

}  // namespace

double forward(const Layout& L, std::span<const double> p, std::span<const double> u) {
  const double* W = p.data() + L.w_hidden_offset();
  const double* bh = p.data() + L.b_hidden_offset();
  const double* wo = p.data() + L.w_out_offset();
  double y = p[L.b_out_offset()];
  for (std::size_t j = 0; j < L.hidden_width; ++j) {
    double a = bh[j];
    const double* row = W + j * L.input_width;
    for (std::size_t i = 0; i < L.input_width; ++i) a += row[i] * u[i];
    y += wo[j] * std::tanh(a);
  }
  return y;
}

double mse_gradient(const Layout& L, std::span<const double> p, std::span<const double> inputs,
                    std::span<const double> targets, std::span<double> gradient) {
  const std::size_t n = targets.size();
  const std::size_t P = L.parameter_count();
  const std::size_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<double> partial_grad(n_blocks * P, 0.0);
  std::vector<double> partial_loss(n_blocks, 0.0);

#pragma omp parallel
  {
    std::vector<double> hidden(L.hidden_width);
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
      const auto bi = static_cast<std::size_t>(b);
      const std::size_t lo = bi * kBlockSize;
      const std::size_t hi = std::min(n, lo + kBlockSize);
      double* g = partial_grad.data() + bi * P;
      double loss = 0.0;
      for (std::size_t s = lo; s < hi; ++s) {
        loss += accumulate_sample(L, p, inputs.data() + s * L.input_width, targets[s], g, hidden.data());
      }
      partial_loss[bi] = loss;
    }
  }

  std::fill(gradient.begin(), gradient.end(), 0.0);
  double loss = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    loss += partial_loss[b];
    const double* g = partial_grad.data() + b * P;
    for (std::size_t k = 0; k < P; ++k) gradient[k] += g[k];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& g : gradient) g *= 2.0 * inv_n;
  return loss * inv_n;
}

double mse_gradient_serial(const Layout& L, std::span<const double> p, std::span<const double> inputs,
                           std::span<const double> targets, std::span<double> gradient) {
  const std::size_t n = targets.size();
  std::vector<double> hidden(L.hidden_width);
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double loss = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    loss += accumulate_sample(L, p, inputs.data() + s * L.input_width, targets[s], gradient.data(),
                              hidden.data());
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& g : gradient) g *= 2.0 * inv_n;
  return loss * inv_n;
}

void forward_batch(const Layout& L, std::span<const double> p, std::span<const double> inputs,
                   std::span<double> outputs) {
  const auto n = static_cast<std::ptrdiff_t>(outputs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto k = static_cast<std::size_t>(s);
    outputs[k] = forward(L, p, inputs.subspan(k * L.input_width, L.input_width));
  }
}

void forward_batch_serial(const Layout& L, std::span<const double> p, std::span<const double> inputs,
                          std::span<double> outputs) {
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    outputs[s] = forward(L, p, inputs.subspan(s * L.input_width, L.input_width));
  }
}

}  // namespace pvfc::kernels
