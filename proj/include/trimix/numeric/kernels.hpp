#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <span>

#include "trimix/numeric/tensor.hpp"

// Value-only building blocks shared by the differentiable ops and the tests.

namespace trimix::kernels {

template <std::floating_point Scalar>
Scalar gelu(Scalar x) {
  return Scalar(0.5) * x * (Scalar(1) + std::erf(x / std::numbers::sqrt2_v<Scalar>));
}

/// d/dx gelu(x) = Phi(x) + x * phi(x).
template <std::floating_point Scalar>
Scalar gelu_derivative(Scalar x) {
  const Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(x / std::numbers::sqrt2_v<Scalar>));
  const Scalar pdf = std::exp(Scalar(-0.5) * x * x) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
  return cdf + x * pdf;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> gelu(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return gelu(v); });
}

/// Row-wise softmax where `keep[j] == 0` excludes column j (weight exactly 0).
/// At least one column must be kept.
template <typename Derived>
MatrixX<typename Derived::Scalar> masked_softmax_rows(const Eigen::MatrixBase<Derived>& scores,
                                                      std::span<const unsigned char> keep) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Scalar peak = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      if (keep[static_cast<std::size_t>(c)]) peak = std::max(peak, scores(r, c));
    }
    Scalar total = 0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      const Scalar e = keep[static_cast<std::size_t>(c)] ? std::exp(scores(r, c) - peak) : Scalar(0);
      out(r, c) = e;
      total += e;
    }
    out.row(r) /= total;
  }
  return out;
}

/// Per-row normalisation to zero mean and unit (biased) variance.
template <typename Derived>
MatrixX<typename Derived::Scalar> normalize_rows(const Eigen::MatrixBase<Derived>& x,
                                                 typename Derived::Scalar eps,
                                                 RowVectorX<typename Derived::Scalar>* inv_std = nullptr) {
  using Scalar = typename Derived::Scalar;
  const auto cols = static_cast<Scalar>(x.cols());
  MatrixX<Scalar> out(x.rows(), x.cols());
  if (inv_std) inv_std->resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Scalar mean = x.row(r).sum() / cols;
    const Scalar var = (x.row(r).array() - mean).square().sum() / cols;
    const Scalar inv = Scalar(1) / std::sqrt(var + eps);
    out.row(r) = (x.row(r).array() - mean) * inv;
    if (inv_std) (*inv_std)(r) = inv;
  }
  return out;
}

/// Numerically stable log(sum(exp(row))).
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& row) {
  const auto peak = row.maxCoeff();
  return peak + std::log((row.array() - peak).exp().sum());
}

}  // namespace trimix::kernels
