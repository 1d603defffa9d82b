#pragma once

#include "itrc/numerics/rng.hpp"
#include "itrc/numerics/tensor.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>

namespace itrc::num {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
/// x + b with b (1 x cols) broadcast over rows.
Tensor add_row(const Tensor& x, const Tensor& b);
Tensor scale(const Tensor& x, double s);

/// Y = XW (+ b per row).
Tensor linear(const Tensor& x, const Tensor& w, const std::optional<Tensor>& b = std::nullopt);

/// max(x, slope * x); slope = 0 is ReLU.
Tensor leaky_relu(const Tensor& x, double slope);
inline Tensor relu(const Tensor& x) { return leaky_relu(x, 0.0); }

/// Inverted dropout. Identity when !training or rate == 0.
Tensor dropout(const Tensor& x, double rate, SeededRng& rng, bool training);

/// P * H for a constant sparse operator P.
Tensor spmm(std::shared_ptr<const SparseMatrix> p, const Tensor& h);

Tensor sum(const Tensor& x);
/// sum(x .* w) for a constant weight matrix; handy as a generic scalar probe.
Tensor weighted_sum(const Tensor& x, const Matrix& w);

/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

struct CrossEntropy {
  Tensor loss;   // 1x1, mean over supervised rows
  Matrix probs;  // n x C
};

/// Mean of -log softmax(logits)[i, label_i] over rows with mask[i] set
/// (all rows when mask is empty).
CrossEntropy softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                   std::span<const std::uint8_t> mask = {});

/// Uniform in +-sqrt(6 / (rows + cols)).
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, SeededRng& rng);

}  // namespace itrc::num
