#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trimix {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = MatrixX<double>;
using RowVector = RowVectorX<double>;

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major float64 tensor with an optional gradient buffer.
///
/// Storage is a matrix whose column count is the last dimension and whose
/// row count is the product of the leading dimensions; a scalar is 1x1 and a
/// vector of length n is 1xn.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, Matrix data, bool requires_grad = false);

  static Tensor from_values(Shape shape, std::span<const double> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }
  std::size_t rank() const { return shape_.size(); }

  Matrix& matrix() { return data_; }
  const Matrix& matrix() const { return data_; }
  std::span<double> data() { return {data_.data(), size()}; }
  std::span<const double> data() const { return {data_.data(), size()}; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool on) { requires_grad_ = on; }

  bool has_grad() const { return grad_.has_value(); }
  /// Gradient buffer, allocated as zeros on first access.
  Matrix& grad();
  const Matrix* grad_if_present() const { return grad_ ? &*grad_ : nullptr; }
  void zero_grad();
  void clear_grad() { grad_.reset(); }

  bool all_finite() const { return data_.allFinite(); }

 private:
  Shape shape_{};
  Matrix data_{};
  bool requires_grad_ = false;
  std::optional<Matrix> grad_{};
};

}  // namespace trimix
