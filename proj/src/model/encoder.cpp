#include "trimix/model/encoder.hpp"

#include <numeric>

#include "trimix/error.hpp"
#include "trimix/numeric/ops.hpp"

namespace trimix {

namespace {

constexpr double kInitStd = 0.02;

std::string layer_prefix(std::size_t i) { return "layers." + std::to_string(i) + "."; }

void fill_normal(Tensor& t, Rng& rng) {
  for (double& x : t.data()) x = kInitStd * rng.normal();
}

Var linear(Graph& g, const BoundModel& m, Var x, const std::string& name) {
  return add_bias(g, matmul(g, x, m[name + ".weight"]), m[name + ".bias"]);
}

Var norm(Graph& g, const BoundModel& m, Var x, const std::string& name) {
  return layer_norm(g, x, m[name + ".gamma"], m[name + ".beta"]);
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size <= static_cast<std::size_t>(5)) throw ConfigError("vocab_size must exceed the 5 special tokens");
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
  if (hidden == 0 || layers == 0 || heads == 0 || ff_dim == 0) {
    throw ConfigError("hidden, layers, heads and ff_dim must be positive");
  }
  if (hidden % heads != 0) {
    throw ConfigError("hidden size " + std::to_string(hidden) + " is not divisible by " + std::to_string(heads) +
                      " heads");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

void ModelParams::add(std::string name, Shape shape) {
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), Tensor(std::move(shape), true)});
}

void ModelParams::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].name, i);
}

ModelParams ModelParams::zeros(const EncoderConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.cfg_ = cfg;
  const std::size_t d = cfg.hidden;
  p.add("embeddings.token", {cfg.vocab_size, d});
  p.add("embeddings.position", {cfg.max_len, d});
  for (std::size_t i = 0; i < cfg.layers; ++i) {
    const auto pre = layer_prefix(i);
    for (const char* proj : {"query", "key", "value", "output"}) {
      p.add(pre + "attention." + proj + ".weight", {d, d});
      p.add(pre + "attention." + proj + ".bias", {d});
    }
    p.add(pre + "attention_norm.gamma", {d});
    p.add(pre + "attention_norm.beta", {d});
    p.add(pre + "ffn.in.weight", {d, cfg.ff_dim});
    p.add(pre + "ffn.in.bias", {cfg.ff_dim});
    p.add(pre + "ffn.out.weight", {cfg.ff_dim, d});
    p.add(pre + "ffn.out.bias", {d});
    p.add(pre + "output_norm.gamma", {d});
    p.add(pre + "output_norm.beta", {d});
  }
  p.add("mlm.dense.weight", {d, d});
  p.add("mlm.dense.bias", {d});
  p.add("mlm.norm.gamma", {d});
  p.add("mlm.norm.beta", {d});
  if (!cfg.tie_mlm_output) p.add("mlm.output.weight", {d, cfg.vocab_size});
  p.add("mlm.output.bias", {cfg.vocab_size});
  if (cfg.label_count > 0) {
    p.add("classifier.weight", {d, cfg.label_count});
    p.add("classifier.bias", {cfg.label_count});
  }
  return p;
}

ModelParams ModelParams::init(const EncoderConfig& cfg, Rng& rng) {
  ModelParams p = zeros(cfg);
  for (auto& [name, t] : p.entries_) {
    if (name.ends_with(".gamma")) {
      t.matrix().setOnes();
    } else if (!name.ends_with(".bias") && !name.ends_with(".beta")) {
      fill_normal(t, rng);
    }
  }
  return p;
}

void ModelParams::attach_classifier(std::size_t label_count, Rng& rng) {
  if (label_count < 2) throw ConfigError("a classifier needs at least 2 labels");
  std::erase_if(entries_, [](const NamedParameter& e) { return e.name.starts_with("classifier."); });
  reindex();
  cfg_.label_count = label_count;
  add("classifier.weight", {cfg_.hidden, label_count});
  add("classifier.bias", {label_count});
  fill_normal(at("classifier.weight"), rng);
}

std::size_t ModelParams::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ConfigError("model has no parameter '" + std::string(name) + "'");
  return it->second;
}

Tensor& ModelParams::at(std::string_view name) { return entries_[index_of(name)].tensor; }
const Tensor& ModelParams::at(std::string_view name) const { return entries_[index_of(name)].tensor; }
bool ModelParams::contains(std::string_view name) const { return index_.contains(std::string(name)); }

std::size_t ModelParams::scalar_count() const {
  return std::accumulate(entries_.begin(), entries_.end(), std::size_t{0},
                         [](std::size_t n, const NamedParameter& e) { return n + e.tensor.size(); });
}

bool ModelParams::all_finite() const {
  for (const auto& e : entries_) {
    if (!e.tensor.all_finite()) return false;
  }
  return true;
}

void ModelParams::set_trainable(bool on) {
  for (auto& e : entries_) e.tensor.set_requires_grad(on);
}

void ModelParams::zero_grad() {
  for (auto& e : entries_) e.tensor.clear_grad();
}

bool is_decay_exempt(std::string_view name) {
  return name.ends_with(".bias") || name.ends_with(".gamma") || name.ends_with(".beta");
}

BoundModel::BoundModel(Graph& g, ModelParams& params) : params_(&params) {
  vars_.reserve(params.entries().size());
  for (auto& e : params.entries()) vars_.push_back(g.parameter(e.tensor));
}

Var BoundModel::operator[](std::string_view name) const { return vars_[params_->index_of(name)]; }

Var forward_encoder(Graph& g, const BoundModel& m, const Batch& batch, Mode mode, Rng* rng) {
  const EncoderConfig& cfg = m.config();
  if (batch.batch == 0 || batch.seq_len == 0) throw DimensionError("forward_encoder: empty batch");
  if (batch.seq_len > cfg.max_len) {
    throw DimensionError("forward_encoder: sequence length " + std::to_string(batch.seq_len) + " exceeds max_len " +
                         std::to_string(cfg.max_len));
  }
  if (batch.ids.size() != batch.rows() || batch.attention.size() != batch.rows()) {
    throw DimensionError("forward_encoder: ids/attention do not match batch x seq_len");
  }
  const bool drop = mode == Mode::Train && cfg.dropout > 0.0;
  if (drop && rng == nullptr) throw ConfigError("forward_encoder: train-mode dropout needs an rng");

  std::vector<int> positions(batch.rows());
  for (std::size_t r = 0; r < batch.rows(); ++r) positions[r] = static_cast<int>(r % batch.seq_len);

  Var x = add(g, embedding(g, m["embeddings.token"], batch.ids), embedding(g, m["embeddings.position"], positions));
  if (drop) x = dropout(g, x, cfg.dropout, *rng);

  const AttentionLayout layout{batch.batch, batch.seq_len, cfg.heads};
  for (std::size_t i = 0; i < cfg.layers; ++i) {
    const auto pre = layer_prefix(i);
    Var q = linear(g, m, x, pre + "attention.query");
    Var k = linear(g, m, x, pre + "attention.key");
    Var v = linear(g, m, x, pre + "attention.value");
    Var a = linear(g, m, self_attention(g, q, k, v, layout, batch.attention), pre + "attention.output");
    if (drop) a = dropout(g, a, cfg.dropout, *rng);
    x = norm(g, m, add(g, x, a), pre + "attention_norm");

    Var h = linear(g, m, gelu(g, linear(g, m, x, pre + "ffn.in")), pre + "ffn.out");
    if (drop) h = dropout(g, h, cfg.dropout, *rng);
    x = norm(g, m, add(g, x, h), pre + "output_norm");
  }
  return x;
}

Var mlm_logits(Graph& g, const BoundModel& m, Var hidden) {
  Var h = norm(g, m, gelu(g, linear(g, m, hidden, "mlm.dense")), "mlm.norm");
  Var z = m.config().tie_mlm_output ? matmul_transposed(g, h, m["embeddings.token"])
                                    : matmul(g, h, m["mlm.output.weight"]);
  return add_bias(g, z, m["mlm.output.bias"]);
}

Var cls_logits(Graph& g, const BoundModel& m, Var hidden, const Batch& batch) {
  if (m.config().label_count == 0) throw ConfigError("model has no classification head");
  std::vector<std::size_t> rows(batch.batch);
  for (std::size_t b = 0; b < batch.batch; ++b) rows[b] = b * batch.seq_len;
  return linear(g, m, gather_rows(g, hidden, rows), "classifier");
}

Var mlm_loss(Graph& g, const BoundModel& m, Var hidden, std::span<const int> labels) {
  std::vector<std::size_t> rows;
  std::vector<int> targets;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == kIgnoreLabel) continue;
    rows.push_back(r);
    targets.push_back(labels[r]);
  }
  return softmax_cross_entropy(g, mlm_logits(g, m, gather_rows(g, hidden, rows)), targets);
}

Matrix encode_hidden(ModelParams& params, const Batch& batch) {
  Graph g;
  BoundModel m(g, params);
  return g.value(forward_encoder(g, m, batch, Mode::Eval, nullptr));
}

}  // namespace trimix
