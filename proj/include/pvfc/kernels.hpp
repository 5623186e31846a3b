#pragma once

// Hot loops of network training and inference. Each kernel has an OpenMP
// version and a plain serial reference used by the tests and the benchmark.
//
// The parallel kernels split the batch into fixed-size blocks and reduce the
// per-block partials in block order, so results do not depend on the thread
// count. They are not bit-identical to the serial reference, which sums in
// sample order.

#include <cstddef>
#include <span>

namespace pvfc::kernels {

/// Shape of the single-hidden-layer network; parameters are laid out as
/// [W_hidden (hidden x input, row-major) | b_hidden | w_out | b_out].
struct Layout {
  std::size_t input_width = 0;
  std::size_t hidden_width = 0;

  constexpr std::size_t w_hidden_offset() const { return 0; }
  constexpr std::size_t b_hidden_offset() const { return hidden_width * input_width; }
  constexpr std::size_t w_out_offset() const { return b_hidden_offset() + hidden_width; }
  constexpr std::size_t b_out_offset() const { return w_out_offset() + hidden_width; }
  constexpr std::size_t parameter_count() const { return b_out_offset() + 1; }
};

inline constexpr std::size_t kBlockSize = 128;

/// y = w_out . tanh(W_h u + b_h) + b_out
double forward(const Layout& layout, std::span<const double> params, std::span<const double> input);

/// Mean squared error over the batch and its gradient. `inputs` is row-major
/// (n_samples x input_width); `gradient` must hold parameter_count() values.
double mse_gradient(const Layout& layout, std::span<const double> params, std::span<const double> inputs,
                    std::span<const double> targets, std::span<double> gradient);

double mse_gradient_serial(const Layout& layout, std::span<const double> params,
                           std::span<const double> inputs, std::span<const double> targets,
                           std::span<double> gradient);

void forward_batch(const Layout& layout, std::span<const double> params, std::span<const double> inputs,
                   std::span<double> outputs);

void forward_batch_serial(const Layout& layout, std::span<const double> params,
                          std::span<const double> inputs, std::span<double> outputs);

}  // namespace pvfc::kernels
