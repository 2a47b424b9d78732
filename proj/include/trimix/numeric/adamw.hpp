#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trimix/numeric/tensor.hpp"

namespace trimix {

struct AdamWConfig {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  /// Rescale all gradients together when their global L2 norm exceeds this; 0 disables.
  double max_grad_norm = 0.0;
};

/// A trainable tensor as the optimizer sees it.
struct ParamRef {
  std::string name;
  Tensor* tensor = nullptr;
  /// Biases and layer-norm affines are conventionally excluded from decay.
  bool decay = true;
};

struct AdamWState {
  std::size_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

/// One AdamW update with decoupled weight decay:
///   w <- w * (1 - lr * wd)
///   w <- w - lr * m_hat / (sqrt(v_hat) + eps)
/// with bias-corrected moments, after optional global-norm clipping. Gradients are read from each tensor's grad
/// buffer (a missing buffer counts as zero). Throws NumericError naming the
/// first parameter with a non-finite gradient; nothing is modified then.
void adamw_step(std::vector<ParamRef>& params, AdamWState& state, const AdamWConfig& cfg);

class AdamW {
 public:
  AdamW(std::vector<ParamRef> params, AdamWConfig cfg);

  void step();
  void zero_grad();
  void set_lr(double lr) { cfg_.lr = lr; }

  const AdamWState& state() const { return state_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  std::vector<ParamRef> params_;
  AdamWConfig cfg_;
  AdamWState state_;
};

}  // namespace trimix
