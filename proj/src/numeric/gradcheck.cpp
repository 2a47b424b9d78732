#include "trimix/numeric/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace trimix {

namespace {

double evaluate(const LossFn& loss) {
  Graph g;
  return g.value(loss(g))(0, 0);
}

}  // namespace

GradCheckResult finite_diff_check(const LossFn& loss, const std::vector<Tensor*>& params) {
  std::vector<bool> saved_flags;
  for (Tensor* p : params) {
    saved_flags.push_back(p->requires_grad());
    p->set_requires_grad(true);
    p->clear_grad();
  }
  {
    Graph g;
    g.backward(loss(g));
  }
  std::vector<Matrix> analytic;
  for (Tensor* p : params) analytic.push_back(p->has_grad() ? p->grad() : Matrix::Zero(p->matrix().rows(), p->matrix().cols()));
  for (Tensor* p : params) p->set_requires_grad(false);

  double diff_sq = 0.0;
  double analytic_sq = 0.0;
  double numeric_sq = 0.0;
  std::size_t entries = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k]->data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x = values[i];
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      values[i] = x + h;
      const double up = evaluate(loss);
      values[i] = x - h;
      const double down = evaluate(loss);
      values[i] = x;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k].data()[i];
      diff_sq += (a - numeric) * (a - numeric);
      analytic_sq += a * a;
      numeric_sq += numeric * numeric;
      ++entries;
    }
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k]->set_requires_grad(saved_flags[k]);
    params[k]->clear_grad();
  }

  GradCheckResult result;
  result.entries = entries;
  result.analytic_norm = std::sqrt(analytic_sq);
  const double denom = std::max({std::sqrt(analytic_sq), std::sqrt(numeric_sq), 1e-300});
  result.max_relative_error = std::sqrt(diff_sq) / denom;
  if (analytic_sq == 0.0 && numeric_sq == 0.0) result.max_relative_error = 0.0;
  return result;
}

}  // namespace trimix
