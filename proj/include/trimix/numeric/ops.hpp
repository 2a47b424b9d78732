#pragma once

#include <cstddef>
#include <span>

#include "trimix/numeric/graph.hpp"
#include "trimix/numeric/rng.hpp"

namespace trimix {

/// Label value excluded from the loss.
inline constexpr int kIgnoreLabel = -1;

// Differentiable ops. Every op checks shapes and throws DimensionError on mismatch.

Var matmul(Graph& g, Var a, Var b);
/// a * b^T, so a [r x k] against b [c x k] gives [r x c].
Var matmul_transposed(Graph& g, Var a, Var b);
Var add(Graph& g, Var a, Var b);
/// x [r x c] + bias [1 x c] broadcast over rows.
Var add_bias(Graph& g, Var x, Var bias);
Var scale(Graph& g, Var x, double factor);
/// Sum of all entries, as a 1x1 value.
Var sum(Graph& g, Var x);
/// Exact erf-based GELU.
Var gelu(Graph& g, Var x);
/// Row-wise layer normalisation with affine gamma/beta of shape [1 x c].
Var layer_norm(Graph& g, Var x, Var gamma, Var beta, double eps = 1e-12);
/// Mean negative log-likelihood over rows whose label is not kIgnoreLabel.
Var softmax_cross_entropy(Graph& g, Var logits, std::span<const int> labels);

/// Rows of `table` selected by `ids`.
Var embedding(Graph& g, Var table, std::span<const int> ids);
/// Rows of `x` at the given indices (repeats allowed).
Var gather_rows(Graph& g, Var x, std::span<const std::size_t> rows);

/// Inverted dropout; identity when `p == 0`.
Var dropout(Graph& g, Var x, double p, Rng& rng);

/// Layout of a flattened batch: `batch` sequences of `seq_len` rows each.
struct AttentionLayout {
  std::size_t batch = 0;
  std::size_t seq_len = 0;
  std::size_t heads = 1;
};

/// Scaled dot-product self-attention over all heads.
///
/// q, k, v are [(batch*seq_len) x d]; head h uses columns [h*d/H, (h+1)*d/H).
/// `key_mask` has batch*seq_len entries; keys with 0 get weight exactly 0
/// (additive -inf before the softmax). Each sequence needs one unmasked key.
Var self_attention(Graph& g, Var q, Var k, Var v, const AttentionLayout& layout,
                   std::span<const unsigned char> key_mask);

}  // namespace trimix
