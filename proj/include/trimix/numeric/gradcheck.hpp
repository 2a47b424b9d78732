#pragma once

#include <functional>
#include <vector>

#include "trimix/numeric/graph.hpp"

namespace trimix {

struct GradCheckResult {
  /// ||analytic - numeric||_2 / max(||analytic||_2, ||numeric||_2).
  double max_relative_error = 0.0;
  double analytic_norm = 0.0;
  std::size_t entries = 0;
};

/// Builds a scalar loss on a fresh graph. Parameters must be bound with
/// `Graph::parameter`.
using LossFn = std::function<Var(Graph&)>;

/// Compares reverse-mode gradients of `loss` w.r.t. every entry of `params`
/// against central differences with h = 1e-5 * max(1, |x|).
///
/// The relative error is taken over all entries jointly, so entries whose
/// true gradient is zero do not blow up the ratio. Parameter values are
/// restored and gradients cleared on return.
GradCheckResult finite_diff_check(const LossFn& loss, const std::vector<Tensor*>& params);

}  // namespace trimix
