#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace itrc::num {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class AutodiffError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

std::string shape_string(const Matrix& m);

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  bool has_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Pushes this node's grad into its parents.
  std::function<void(const Node&)> backward;

  void accumulate(const Matrix& g);
  void accumulate(Matrix&& g);
};

}  // namespace detail

/// Handle to a node of the autodiff graph. Copies share the node.
///
/// Values are rank-2 row-major matrices; a scalar is 1x1. Leaves created with
/// parameter() collect gradients on backward(); everything else is transient.
class Tensor {
public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor parameter(Matrix value);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  /// Mutable access for optimizer updates; only valid on leaves.
  Matrix& mutable_value();

  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  std::vector<std::size_t> shape() const {
    return {static_cast<std::size_t>(rows()), static_cast<std::size_t>(cols())};
  }
  double item() const;

  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool has_grad() const { return node_ && node_->has_grad; }
  const Matrix& grad() const;
  void zero_grad();

  // Op construction; used by ops.cpp.
  static Tensor from_op(Matrix value, std::vector<Tensor> inputs,
                        std::function<void(const detail::Node&)> backward);
  const std::shared_ptr<detail::Node>& node() const { return node_; }

private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;
};

/// Reverse sweep from a scalar loss. Every reachable parameter must have no
/// pending gradient; a second backward() without zero_grad() throws.
void backward(const Tensor& loss);

}  // namespace itrc::num
