#include "itrc/numerics/ops.hpp"

#include <cmath>

namespace itrc::num {

namespace {

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
}

void push(const std::shared_ptr<detail::Node>& parent, const Matrix& g) {
  if (parent->requires_grad) parent->accumulate(g);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions disagree " + shape_string(a.value()) + " x " +
                         shape_string(b.value()));
  Matrix y = a.value() * b.value();
  return Tensor::from_op(std::move(y), {a, b}, [](const detail::Node& n) {
    const auto& pa = n.parents[0];
    const auto& pb = n.parents[1];
    if (pa->requires_grad) pa->accumulate(n.grad * pb->value.transpose());
    if (pb->requires_grad) pb->accumulate(pa->value.transpose() * n.grad);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a.value(), b.value());
  Matrix y = a.value() + b.value();
  return Tensor::from_op(std::move(y), {a, b}, [](const detail::Node& n) {
    push(n.parents[0], n.grad);
    push(n.parents[1], n.grad);
  });
}

Tensor add_row(const Tensor& x, const Tensor& b) {
  if (b.rows() != 1 || b.cols() != x.cols())
    throw DimensionError("add_row: bias " + shape_string(b.value()) + " does not fit " +
                         shape_string(x.value()));
  Matrix y = x.value().rowwise() + b.value().row(0);
  return Tensor::from_op(std::move(y), {x, b}, [](const detail::Node& n) {
    push(n.parents[0], n.grad);
    if (n.parents[1]->requires_grad) n.parents[1]->accumulate(n.grad.colwise().sum());
  });
}

Tensor scale(const Tensor& x, double s) {
  Matrix y = x.value() * s;
  return Tensor::from_op(std::move(y), {x},
                         [s](const detail::Node& n) { push(n.parents[0], n.grad * s); });
}

Tensor linear(const Tensor& x, const Tensor& w, const std::optional<Tensor>& b) {
  if (x.cols() != w.rows())
    throw DimensionError("linear: input " + shape_string(x.value()) + " does not match weight " +
                         shape_string(w.value()));
  Tensor y = matmul(x, w);
  return b ? add_row(y, *b) : y;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Matrix y = x.value().unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
  return Tensor::from_op(std::move(y), {x}, [slope](const detail::Node& n) {
    const Matrix& in = n.parents[0]->value;
    Matrix g = n.grad.binaryExpr(in, [slope](double gy, double v) { return v > 0.0 ? gy : slope * gy; });
    push(n.parents[0], g);
  });
}

Tensor dropout(const Tensor& x, double rate, SeededRng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ParameterError("dropout: rate must be in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  Matrix y = x.value().cwiseProduct(mask);
  return Tensor::from_op(std::move(y), {x}, [mask = std::move(mask)](const detail::Node& n) {
    push(n.parents[0], n.grad.cwiseProduct(mask));
  });
}

Tensor spmm(std::shared_ptr<const SparseMatrix> p, const Tensor& h) {
  if (p->cols() != h.rows())
    throw DimensionError("spmm: operator [" + std::to_string(p->rows()) + "x" +
                         std::to_string(p->cols()) + "] does not fit " + shape_string(h.value()));
  Matrix y = (*p) * h.value();
  return Tensor::from_op(std::move(y), {h}, [p = std::move(p)](const detail::Node& n) {
    if (n.parents[0]->requires_grad) n.parents[0]->accumulate(p->transpose() * n.grad);
  });
}

Tensor sum(const Tensor& x) {
  Matrix y(1, 1);
  y(0, 0) = x.value().sum();
  return Tensor::from_op(std::move(y), {x}, [](const detail::Node& n) {
    const Matrix& in = n.parents[0]->value;
    push(n.parents[0], Matrix::Constant(in.rows(), in.cols(), n.grad(0, 0)));
  });
}

Tensor weighted_sum(const Tensor& x, const Matrix& w) {
  require_same_shape("weighted_sum", x.value(), w);
  Matrix y(1, 1);
  y(0, 0) = x.value().cwiseProduct(w).sum();
  return Tensor::from_op(std::move(y), {x}, [w](const detail::Node& n) {
    push(n.parents[0], w * n.grad(0, 0));
  });
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    double total = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double e = std::exp(logits(i, c) - mx);
      probs(i, c) = e;
      total += e;
    }
    probs.row(i) /= total;
  }
  return probs;
}

CrossEntropy softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                   std::span<const std::uint8_t> mask) {
  const Matrix& z = logits.value();
  const auto n = z.rows();
  const auto classes = z.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + shape_string(z));
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != n)
    throw DimensionError("softmax_cross_entropy: mask length " + std::to_string(mask.size()) +
                         " for " + shape_string(z));

  Matrix probs = softmax_rows(z);
  double total = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const int y = labels[i];
    if (y < 0 || y >= classes)
      throw ParameterError("softmax_cross_entropy: label " + std::to_string(y) + " out of range");
    // Log-sum-exp form stays finite where probs underflow.
    const double mx = z.row(i).maxCoeff();
    const double lse = mx + std::log((z.row(i).array() - mx).exp().sum());
    total += lse - z(i, y);
    ++count;
  }
  if (count == 0) throw ParameterError("softmax_cross_entropy: no supervised rows");

  Matrix loss(1, 1);
  loss(0, 0) = total / static_cast<double>(count);
  std::vector<int> lab(labels.begin(), labels.end());
  std::vector<std::uint8_t> msk(mask.begin(), mask.end());
  Tensor t = Tensor::from_op(
      std::move(loss), {logits},
      [probs, lab = std::move(lab), msk = std::move(msk), count](const detail::Node& n) {
        Matrix g = Matrix::Zero(probs.rows(), probs.cols());
        const double s = n.grad(0, 0) / static_cast<double>(count);
        for (Eigen::Index i = 0; i < probs.rows(); ++i) {
          if (!msk.empty() && !msk[i]) continue;
          g.row(i) = probs.row(i) * s;
          g(i, lab[i]) -= s;
        }
        push(n.parents[0], g);
      });
  return {std::move(t), std::move(probs)};
}

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix w(rows, cols);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
  return w;
}

}  // namespace itrc::num
