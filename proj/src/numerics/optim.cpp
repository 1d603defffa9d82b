#include "itrc/numerics/optim.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace itrc::num {

namespace {

// Exponent-bit test; unlike allFinite() this vectorizes.
bool all_finite(const Matrix& m) {
  constexpr std::uint64_t exp_mask = 0x7ff0000000000000ULL;
  const double* d = m.data();
  std::uint64_t bad = 0;
  for (Eigen::Index k = 0; k < m.size(); ++k)
    bad |= static_cast<std::uint64_t>((std::bit_cast<std::uint64_t>(d[k]) & exp_mask) == exp_mask);
  return bad == 0;
}

}  // namespace

AdamState make_adam_state(std::span<const NamedParameter> params, double beta1, double beta2,
                          double eps) {
  AdamState s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  for (const auto& p : params) {
    s.m.push_back(Matrix::Zero(p.tensor.rows(), p.tensor.cols()));
    s.v.push_back(Matrix::Zero(p.tensor.rows(), p.tensor.cols()));
  }
  return s;
}

void adam_step(std::span<NamedParameter> params, AdamState& state, double lr) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw DimensionError("adam_step: state holds " + std::to_string(state.m.size()) +
                         " moment buffers for " + std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& t = params[i].tensor;
    if (state.m[i].rows() != t.rows() || state.m[i].cols() != t.cols())
      throw DimensionError("adam_step: moment shape " + shape_string(state.m[i]) +
                           " differs from parameter '" + params[i].name + "' " +
                           shape_string(t.value()));
    if (t.has_grad() && !all_finite(t.grad()))
      throw ParameterError("adam_step: non-finite gradient in parameter '" + params[i].name + "'");
  }

  ++state.step;
  const double step = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, step);
  const double bc2 = 1.0 - std::pow(state.beta2, step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = params[i].tensor;
    if (!t.has_grad()) continue;
    const double* __restrict g = t.grad().data();
    double* __restrict m = state.m[i].data();
    double* __restrict v = state.v[i].data();
    double* __restrict p = t.mutable_value().data();
    const double b1 = state.beta1, b2 = state.beta2, eps = state.eps;
    for (Eigen::Index k = 0, n = state.m[i].size(); k < n; ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      p[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps);
    }
    t.zero_grad();
  }
}

double lr_decay_factor(std::size_t epoch, std::size_t total_epochs) {
  if (epoch >= total_epochs)
    throw ParameterError("lr_decay_factor: epoch " + std::to_string(epoch) +
                         " outside schedule of " + std::to_string(total_epochs) + " epochs");
  return 1.0 - static_cast<double>(epoch) / static_cast<double>(total_epochs);
}

void zero_grads(std::span<NamedParameter> params) {
  for (auto& p : params) p.tensor.zero_grad();
}

}  // namespace itrc::num
