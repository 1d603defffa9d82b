#pragma once

// Central-difference gradient oracle, independent of the reverse sweep it
// checks: it only perturbs parameter values and re-evaluates the loss.

#include "itrc/numerics/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace itrc::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

/// loss_fn must rebuild the graph from the current parameter values and be
/// deterministic (reseed any RNG inside it).
inline GradCheckResult grad_check(std::vector<num::Tensor> params,
                                  const std::function<num::Tensor()>& loss_fn,
                                  double h = 1e-6) {
  for (auto& p : params) p.zero_grad();
  num::backward(loss_fn());
  std::vector<num::Matrix> analytic;
  for (auto& p : params) {
    analytic.push_back(p.has_grad() ? p.grad()
                                    : num::Matrix::Zero(p.rows(), p.cols()).eval());
    p.zero_grad();
  }

  GradCheckResult out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    num::Matrix& v = params[k].mutable_value();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double orig = v.data()[i];
      v.data()[i] = orig + h;
      const double up = loss_fn().item();
      v.data()[i] = orig - h;
      const double down = loss_fn().item();
      v.data()[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      out.max_rel_error = std::max(out.max_rel_error, rel_error(analytic[k].data()[i], numeric));
      ++out.checked;
    }
  }
  return out;
}

inline num::Matrix random_matrix(Eigen::Index r, Eigen::Index c, num::SeededRng& rng,
                                 double lo = -1.0, double hi = 1.0) {
  num::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

}  // namespace itrc::testing
