#include "trimix/numeric/ops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "trimix/error.hpp"
#include "trimix/numeric/kernels.hpp"

namespace trimix {

namespace {

std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require_same(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shapes " + dims(a) + " and " + dims(b) + " differ");
  }
}

void require_row(const Matrix& row, Eigen::Index cols, const char* op, const char* what) {
  if (row.rows() != 1 || row.cols() != cols) {
    throw DimensionError(std::string(op) + ": " + what + " is " + dims(row) + ", expected 1x" + std::to_string(cols));
  }
}

Var next_var(const Graph& g) { return Var{g.size()}; }

}  // namespace

Var matmul(Graph& g, Var a, Var b) {
  const Matrix& av = g.value(a);
  const Matrix& bv = g.value(b);
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: inner dimensions of " + dims(av) + " and " + dims(bv) + " disagree");
  }
  const Var out = next_var(g);
  return g.record(av * bv, {a, b}, [a, b, out](Graph& g) {
    const Matrix& dy = g.grad(out);
    if (g.requires_grad(a)) g.grad_buffer(a).noalias() += dy * g.value(b).transpose();
    if (g.requires_grad(b)) g.grad_buffer(b).noalias() += g.value(a).transpose() * dy;
  });
}

Var matmul_transposed(Graph& g, Var a, Var b) {
  const Matrix& av = g.value(a);
  const Matrix& bv = g.value(b);
  if (av.cols() != bv.cols()) {
    throw DimensionError("matmul_transposed: " + dims(av) + " and " + dims(bv) + " need equal column counts");
  }
  const Var out = next_var(g);
  return g.record(av * bv.transpose(), {a, b}, [a, b, out](Graph& g) {
    const Matrix& dy = g.grad(out);
    if (g.requires_grad(a)) g.grad_buffer(a).noalias() += dy * g.value(b);
    if (g.requires_grad(b)) g.grad_buffer(b).noalias() += dy.transpose() * g.value(a);
  });
}

Var add(Graph& g, Var a, Var b) {
  require_same(g.value(a), g.value(b), "add");
  const Var out = next_var(g);
  return g.record(g.value(a) + g.value(b), {a, b}, [a, b, out](Graph& g) {
    g.accumulate(a, g.grad(out));
    g.accumulate(b, g.grad(out));
  });
}

Var add_bias(Graph& g, Var x, Var bias) {
  const Matrix& xv = g.value(x);
  require_row(g.value(bias), xv.cols(), "add_bias", "bias");
  Matrix y = xv.rowwise() + g.value(bias).row(0);
  const Var out = next_var(g);
  return g.record(std::move(y), {x, bias}, [x, bias, out](Graph& g) {
    g.accumulate(x, g.grad(out));
    g.accumulate(bias, g.grad(out).colwise().sum());
  });
}

Var scale(Graph& g, Var x, double factor) {
  const Var out = next_var(g);
  return g.record(g.value(x) * factor, {x}, [x, factor, out](Graph& g) { g.accumulate(x, g.grad(out) * factor); });
}

Var sum(Graph& g, Var x) {
  Matrix y(1, 1);
  y(0, 0) = g.value(x).sum();
  const Var out = next_var(g);
  return g.record(std::move(y), {x}, [x, out](Graph& g) {
    const Matrix& xv = g.value(x);
    g.accumulate(x, Matrix::Constant(xv.rows(), xv.cols(), g.grad(out)(0, 0)));
  });
}

Var gelu(Graph& g, Var x) {
  const Var out = next_var(g);
  return g.record(kernels::gelu(g.value(x)), {x}, [x, out](Graph& g) {
    const Matrix& xv = g.value(x);
    Matrix d = xv.unaryExpr([](double v) { return kernels::gelu_derivative(v); });
    g.accumulate(x, d.cwiseProduct(g.grad(out)));
  });
}

Var layer_norm(Graph& g, Var x, Var gamma, Var beta, double eps) {
  const Matrix& xv = g.value(x);
  require_row(g.value(gamma), xv.cols(), "layer_norm", "gamma");
  require_row(g.value(beta), xv.cols(), "layer_norm", "beta");
  if (!(eps > 0.0)) throw ConfigError("layer_norm: eps must be positive");
  RowVector inv_std;
  Matrix xhat = kernels::normalize_rows(xv, eps, &inv_std);
  Matrix y = (xhat.array().rowwise() * g.value(gamma).row(0).array()).matrix().rowwise() + g.value(beta).row(0);
  const Var out = next_var(g);
  return g.record(std::move(y), {x, gamma, beta},
                  [x, gamma, beta, out, xhat = std::move(xhat), inv_std = std::move(inv_std)](Graph& g) {
                    const Matrix& dy = g.grad(out);
                    if (g.requires_grad(gamma)) g.grad_buffer(gamma) += dy.cwiseProduct(xhat).colwise().sum();
                    if (g.requires_grad(beta)) g.grad_buffer(beta) += dy.colwise().sum();
                    if (!g.requires_grad(x)) return;
                    const Matrix dxhat = dy.array().rowwise() * g.value(gamma).row(0).array();
                    const double n = static_cast<double>(xhat.cols());
                    Matrix& dx = g.grad_buffer(x);
                    for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
                      const double mean_d = dxhat.row(r).sum() / n;
                      const double mean_dx = dxhat.row(r).dot(xhat.row(r)) / n;
                      dx.row(r).array() +=
                          inv_std(r) * (dxhat.row(r).array() - mean_d - xhat.row(r).array() * mean_dx);
                    }
                  });
}

Var softmax_cross_entropy(Graph& g, Var logits, std::span<const int> labels) {
  const Matrix& z = g.value(logits);
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(z.rows()) + " rows");
  }
  std::size_t counted = 0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    if (label == kIgnoreLabel) continue;
    if (label < 0 || label >= z.cols()) {
      throw DimensionError("softmax_cross_entropy: label " + std::to_string(label) + " outside [0, " +
                           std::to_string(z.cols()) + ")");
    }
    total += kernels::log_sum_exp(z.row(r)) - z(r, label);
    ++counted;
  }
  if (counted == 0) throw NumericError("softmax_cross_entropy: every label is ignored, loss is empty");
  Matrix y(1, 1);
  y(0, 0) = total / static_cast<double>(counted);
  std::vector<int> kept(labels.begin(), labels.end());
  const Var out = next_var(g);
  return g.record(std::move(y), {logits}, [logits, out, counted, kept = std::move(kept)](Graph& g) {
    const Matrix& z = g.value(logits);
    const double w = g.grad(out)(0, 0) / static_cast<double>(counted);
    Matrix& dz = g.grad_buffer(logits);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      const int label = kept[static_cast<std::size_t>(r)];
      if (label == kIgnoreLabel) continue;
      const double peak = z.row(r).maxCoeff();
      RowVector p = (z.row(r).array() - peak).exp();
      p /= p.sum();
      p(label) -= 1.0;
      dz.row(r) += w * p;
    }
  });
}

Var embedding(Graph& g, Var table, std::span<const int> ids) {
  const Matrix& tv = g.value(table);
  Matrix y(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tv.rows()) {
      throw DimensionError("embedding: id " + std::to_string(ids[i]) + " outside table of " +
                           std::to_string(tv.rows()) + " rows");
    }
    y.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  const Var out = next_var(g);
  return g.record(std::move(y), {table}, [table, out, idx = std::move(idx)](Graph& g) {
    const Matrix& dy = g.grad(out);
    Matrix& dt = g.grad_buffer(table);
    for (std::size_t i = 0; i < idx.size(); ++i) dt.row(idx[i]) += dy.row(static_cast<Eigen::Index>(i));
  });
}

Var gather_rows(Graph& g, Var x, std::span<const std::size_t> rows) {
  const Matrix& xv = g.value(x);
  Matrix y(static_cast<Eigen::Index>(rows.size()), xv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(xv.rows())) {
      throw DimensionError("gather_rows: row " + std::to_string(rows[i]) + " out of range");
    }
    y.row(static_cast<Eigen::Index>(i)) = xv.row(static_cast<Eigen::Index>(rows[i]));
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  const Var out = next_var(g);
  return g.record(std::move(y), {x}, [x, out, idx = std::move(idx)](Graph& g) {
    const Matrix& dy = g.grad(out);
    Matrix& dx = g.grad_buffer(x);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      dx.row(static_cast<Eigen::Index>(idx[i])) += dy.row(static_cast<Eigen::Index>(i));
    }
  });
}

Var dropout(Graph& g, Var x, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw ConfigError("dropout: p must lie in [0, 1)");
  if (p == 0.0) return x;
  const Matrix& xv = g.value(x);
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix mask(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < p ? 0.0 : keep_scale;
  Matrix y = xv.cwiseProduct(mask);
  const Var out = next_var(g);
  return g.record(std::move(y), {x}, [x, out, mask = std::move(mask)](Graph& g) {
    g.accumulate(x, g.grad(out).cwiseProduct(mask));
  });
}

Var self_attention(Graph& g, Var q, Var k, Var v, const AttentionLayout& layout,
                   std::span<const unsigned char> key_mask) {
  const Matrix& qv = g.value(q);
  const Matrix& kv = g.value(k);
  const Matrix& vv = g.value(v);
  require_same(qv, kv, "self_attention");
  require_same(qv, vv, "self_attention");
  const auto n = static_cast<Eigen::Index>(layout.batch);
  const auto t = static_cast<Eigen::Index>(layout.seq_len);
  const auto heads = static_cast<Eigen::Index>(layout.heads);
  if (n * t != qv.rows() || static_cast<Eigen::Index>(key_mask.size()) != qv.rows()) {
    throw DimensionError("self_attention: layout " + std::to_string(n) + "x" + std::to_string(t) +
                         " does not cover " + std::to_string(qv.rows()) + " rows");
  }
  if (heads <= 0 || qv.cols() % heads != 0) {
    throw DimensionError("self_attention: width " + std::to_string(qv.cols()) + " not divisible by heads");
  }
  const Eigen::Index dh = qv.cols() / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix ctx(qv.rows(), qv.cols());
  std::vector<Matrix> probs(static_cast<std::size_t>(n * heads));
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto keep = key_mask.subspan(static_cast<std::size_t>(b * t), static_cast<std::size_t>(t));
    bool any = false;
    for (auto m : keep) any = any || m;
    if (!any) throw DimensionError("self_attention: sequence " + std::to_string(b) + " has no unmasked key");
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix scores = (qv.block(b * t, h * dh, t, dh) * kv.block(b * t, h * dh, t, dh).transpose()) * inv_sqrt;
      Matrix& p = probs[static_cast<std::size_t>(b * heads + h)];
      p = kernels::masked_softmax_rows(scores, keep);
      ctx.block(b * t, h * dh, t, dh).noalias() = p * vv.block(b * t, h * dh, t, dh);
    }
  }
  const Var out = next_var(g);
  return g.record(std::move(ctx), {q, k, v},
                  [q, k, v, out, n, t, heads, dh, inv_sqrt, probs = std::move(probs)](Graph& g) {
                    const Matrix& dy = g.grad(out);
                    const Matrix& qv = g.value(q);
                    const Matrix& kv = g.value(k);
                    const Matrix& vv = g.value(v);
                    Matrix dq = Matrix::Zero(qv.rows(), qv.cols());
                    Matrix dk = Matrix::Zero(qv.rows(), qv.cols());
                    Matrix dv = Matrix::Zero(qv.rows(), qv.cols());
                    for (Eigen::Index b = 0; b < n; ++b) {
                      for (Eigen::Index h = 0; h < heads; ++h) {
                        const Matrix& p = probs[static_cast<std::size_t>(b * heads + h)];
                        const auto dctx = dy.block(b * t, h * dh, t, dh);
                        dv.block(b * t, h * dh, t, dh).noalias() = p.transpose() * dctx;
                        const Matrix dp = dctx * vv.block(b * t, h * dh, t, dh).transpose();
                        const Eigen::VectorXd row_dot = p.cwiseProduct(dp).rowwise().sum();
                        const Matrix ds = (p.array() * (dp.colwise() - row_dot).array()).matrix() * inv_sqrt;
                        dq.block(b * t, h * dh, t, dh).noalias() = ds * kv.block(b * t, h * dh, t, dh);
                        dk.block(b * t, h * dh, t, dh).noalias() = ds.transpose() * qv.block(b * t, h * dh, t, dh);
                      }
                    }
                    g.accumulate(q, dq);
                    g.accumulate(k, dk);
                    g.accumulate(v, dv);
                  });
}

}  // namespace trimix
