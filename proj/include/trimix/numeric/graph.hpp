#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "trimix/numeric/tensor.hpp"

namespace trimix {

/// Handle to a node recorded on a Graph.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so walking
/// them backwards is a valid topological order.
///
/// Parameter leaves alias a Tensor: the forward pass reads its data in place
/// and `backward` accumulates straight into `Tensor::grad()`.
class Graph {
 public:
  using Backward = std::function<void(Graph&)>;

  Var constant(Matrix value);
  /// Leaf bound to `t`. Gradients are recorded only if `t.requires_grad()`.
  Var parameter(Tensor& t);

  /// Records an op result. `backward` is dropped when no input needs gradients.
  Var record(Matrix value, std::initializer_list<Var> inputs, Backward backward);

  const Matrix& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  /// Gradient of the loss w.r.t. `v`; zero-sized until something flows in.
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }

  /// Writable gradient buffer for `v`, zero-initialised on first use.
  /// Parameter leaves hand out the bound tensor's gradient.
  Matrix& grad_buffer(Var v);
  template <typename Derived>
  void accumulate(Var v, const Eigen::MatrixBase<Derived>& delta) {
    if (!nodes_[v.id].requires_grad) return;
    grad_buffer(v) += delta;
  }

  /// Seeds d(loss)/d(loss) = 1 and runs every recorded backward closure.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Tensor* bound = nullptr;
    Matrix grad;
    bool requires_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

}  // namespace trimix
