#include "itrc/numerics/tensor.hpp"

#include <unordered_set>

namespace itrc::num {

std::string shape_string(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

void detail::Node::accumulate(const Matrix& g) {
  if (!has_grad) {
    grad = g;
    has_grad = true;
  } else {
    grad += g;
  }
}

void detail::Node::accumulate(Matrix&& g) {
  if (!has_grad) {
    grad = std::move(g);
    has_grad = true;
  } else {
    grad += g;
  }
}

Tensor Tensor::constant(Matrix value) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  return Tensor(std::move(n));
}

Tensor Tensor::parameter(Matrix value) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Tensor(std::move(n));
}

Matrix& Tensor::mutable_value() {
  if (!node_->parents.empty()) throw AutodiffError("mutable_value() on a non-leaf tensor");
  return node_->value;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1)
    throw DimensionError("item() needs a 1x1 tensor, got " + shape_string(value()));
  return node_->value(0, 0);
}

const Matrix& Tensor::grad() const {
  if (!has_grad()) throw AutodiffError("tensor has no gradient");
  return node_->grad;
}

void Tensor::zero_grad() {
  if (!node_) return;
  node_->has_grad = false;  // storage is kept for the next accumulate
}

Tensor Tensor::from_op(Matrix value, std::vector<Tensor> inputs,
                       std::function<void(const detail::Node&)> backward) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  for (auto& in : inputs) {
    if (in.requires_grad()) n->requires_grad = true;
  }
  if (n->requires_grad) {
    n->parents.reserve(inputs.size());
    for (auto& in : inputs) n->parents.push_back(in.node_);
    n->backward = std::move(backward);
  }
  return Tensor(std::move(n));
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw AutodiffError("backward() on an undefined tensor");
  if (loss.rows() != 1 || loss.cols() != 1)
    throw AutodiffError("backward() needs a scalar loss, got " + shape_string(loss.value()));
  if (!loss.requires_grad()) throw AutodiffError("loss does not depend on any parameter");

  // Iterative post-order DFS; deep GCN stacks would overflow a recursive one.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : order) {
    if (n->parents.empty() && n->has_grad)
      throw AutodiffError("backward(): a parameter already holds a gradient; call zero_grad() first");
  }

  detail::Node* root = loss.node().get();
  root->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->parents.empty() || !n->has_grad) continue;
    n->backward(*n);
    n->grad.resize(0, 0);
    n->has_grad = false;
  }
}

}  // namespace itrc::num
