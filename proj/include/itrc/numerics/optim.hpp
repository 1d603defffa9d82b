#pragma once

#include "itrc/numerics/tensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace itrc::num {

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

struct AdamState {
  std::int64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(std::span<const NamedParameter> params, double beta1 = 0.9,
                          double beta2 = 0.999, double eps = 1e-8);

/// One bias-corrected Adam update over every parameter holding a gradient,
/// then clears the gradients. Parameters without a gradient are left alone.
/// Throws ParameterError naming the first parameter with a non-finite
/// gradient, before anything is modified.
void adam_step(std::span<NamedParameter> params, AdamState& state, double lr);

/// Linear decay 1 - epoch / total_epochs, in (0, 1].
double lr_decay_factor(std::size_t epoch, std::size_t total_epochs);

void zero_grads(std::span<NamedParameter> params);

}  // namespace itrc::num
