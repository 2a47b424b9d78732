#include "trimix/numeric/graph.hpp"

#include "trimix/error.hpp"

namespace trimix {

Var Graph::constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Graph::parameter(Tensor& t) {
  Node node;
  node.bound = &t;
  node.requires_grad = t.requires_grad();
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Graph::record(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
  Node node;
  node.value = std::move(value);
  for (auto in : inputs) node.requires_grad = node.requires_grad || nodes_[in.id].requires_grad;
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Matrix& Graph::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.bound ? n.bound->matrix() : n.value;
}

Matrix& Graph::grad_buffer(Var v) {
  Node& n = nodes_[v.id];
  if (n.bound) return n.bound->grad();
  if (n.grad.size() == 0) {
    const Matrix& val = value(v);
    n.grad = Matrix::Zero(val.rows(), val.cols());
  }
  return n.grad;
}

void Graph::backward(Var loss) {
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw DimensionError("backward needs a scalar loss");
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss)(0, 0) += 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && n.grad.size() != 0) n.backward(*this);
  }
}

}  // namespace trimix
