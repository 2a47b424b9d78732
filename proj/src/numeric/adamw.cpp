#include "trimix/numeric/adamw.hpp"

#include <cmath>

#include "trimix/error.hpp"

namespace trimix {

void adamw_step(std::vector<ParamRef>& params, AdamWState& state, const AdamWConfig& cfg) {
  if (!(cfg.lr > 0.0)) throw ConfigError("adamw: learning rate must be positive");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Matrix::Zero(p.tensor->matrix().rows(), p.tensor->matrix().cols()));
      state.v.push_back(Matrix::Zero(p.tensor->matrix().rows(), p.tensor->matrix().cols()));
    }
  }
  if (state.m.size() != params.size()) throw DimensionError("adamw: state does not match parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix* grad = params[i].tensor->grad_if_present();
    if (state.m[i].rows() != params[i].tensor->matrix().rows() ||
        state.m[i].cols() != params[i].tensor->matrix().cols()) {
      throw DimensionError("adamw: moment shape mismatch for " + params[i].name);
    }
    if (grad && !grad->allFinite()) throw NumericError("adamw: non-finite gradient in " + params[i].name);
  }

  if (cfg.max_grad_norm < 0.0) throw ConfigError("adamw: max_grad_norm must be non-negative");
  double clip = 1.0;
  if (cfg.max_grad_norm > 0.0) {
    double sq = 0.0;
    for (const auto& p : params) {
      if (const Matrix* grad = p.tensor->grad_if_present()) sq += grad->squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (norm > cfg.max_grad_norm) clip = cfg.max_grad_norm / (norm + 1e-6);
  }

  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& w = params[i].tensor->matrix();
    if (params[i].decay && cfg.weight_decay != 0.0) w *= 1.0 - cfg.lr * cfg.weight_decay;
    const Matrix* grad = params[i].tensor->grad_if_present();
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    if (grad) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * clip * *grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * (clip * clip) * grad->cwiseAbs2();
    } else {
      m *= cfg.beta1;
      v *= cfg.beta2;
    }
    w.array() -= cfg.lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg.eps);
  }
}

AdamW::AdamW(std::vector<ParamRef> params, AdamWConfig cfg) : params_(std::move(params)), cfg_(cfg) {}

void AdamW::step() { adamw_step(params_, state_, cfg_); }

void AdamW::zero_grad() {
  for (auto& p : params_) p.tensor->zero_grad();
}

}  // namespace trimix
