#include "trimix/numeric/tensor.hpp"

#include <sstream>

#include "trimix/error.hpp"

namespace trimix {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

std::pair<Eigen::Index, Eigen::Index> storage_dims(const Shape& shape) {
  if (shape.empty()) return {1, 1};
  const auto cols = shape.back();
  const auto rows = cols == 0 ? 0 : shape_size(shape) / cols;
  return {static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

}  // namespace

Tensor::Tensor(Shape shape, bool requires_grad) : shape_(std::move(shape)), requires_grad_(requires_grad) {
  auto [r, c] = storage_dims(shape_);
  data_ = Matrix::Zero(r, c);
}

Tensor::Tensor(Shape shape, Matrix data, bool requires_grad)
    : shape_(std::move(shape)), data_(std::move(data)), requires_grad_(requires_grad) {
  auto [r, c] = storage_dims(shape_);
  if (data_.rows() != r || data_.cols() != c) {
    throw DimensionError("tensor data " + std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()) +
                         " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::from_values(Shape shape, std::span<const double> values) {
  if (values.size() != shape_size(shape)) {
    throw DimensionError("got " + std::to_string(values.size()) + " values for shape " + shape_string(shape));
  }
  Tensor t(std::move(shape));
  std::copy(values.begin(), values.end(), t.data_.data());
  return t;
}

Matrix& Tensor::grad() {
  if (!grad_) grad_ = Matrix::Zero(data_.rows(), data_.cols());
  return *grad_;
}

void Tensor::zero_grad() {
  if (grad_) grad_->setZero();
}

}  // namespace trimix
