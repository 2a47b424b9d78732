#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trimix/numeric/graph.hpp"
#include "trimix/numeric/rng.hpp"
#include "trimix/numeric/tensor.hpp"

namespace trimix {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t max_len = 128;
  std::size_t hidden = 128;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ff_dim = 512;
  double dropout = 0.1;
  /// Zero until a classification head is attached.
  std::size_t label_count = 0;
  /// Reuse the token embedding table as the MLM output projection.
  bool tie_mlm_output = false;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

/// All trainable weights in a fixed manifest order.
///
/// Linear weights are stored [in x out] so a layer is x * W + b.
class ModelParams {
 public:
  ModelParams() = default;

  /// Weights and embeddings ~ N(0, 0.02^2); biases 0; norm gains 1.
  static ModelParams init(const EncoderConfig& cfg, Rng& rng);
  /// Zero-filled tensors with the manifest shapes for `cfg`.
  static ModelParams zeros(const EncoderConfig& cfg);

  /// Adds (or replaces) a classifier with `label_count` outputs.
  void attach_classifier(std::size_t label_count, Rng& rng);

  const EncoderConfig& config() const { return cfg_; }
  std::vector<NamedParameter>& entries() { return entries_; }
  const std::vector<NamedParameter>& entries() const { return entries_; }

  Tensor& at(std::string_view name);
  const Tensor& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  std::size_t scalar_count() const;
  bool all_finite() const;
  /// Sets requires_grad on every tensor.
  void set_trainable(bool on);
  void zero_grad();

 private:
  void add(std::string name, Shape shape);
  void reindex();

  EncoderConfig cfg_{};
  std::vector<NamedParameter> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Names of the parameters excluded from weight decay (biases, norm affines).
bool is_decay_exempt(std::string_view name);

/// A padded batch of `batch` sequences, `seq_len` positions each, row-major.
struct Batch {
  std::size_t batch = 0;
  std::size_t seq_len = 0;
  std::vector<int> ids;
  std::vector<unsigned char> attention;

  std::size_t rows() const { return batch * seq_len; }
};

enum class Mode { Train, Eval };

/// Parameters placed on a graph as leaves.
class BoundModel {
 public:
  BoundModel(Graph& g, ModelParams& params);

  Var operator[](std::string_view name) const;
  const EncoderConfig& config() const { return params_->config(); }

 private:
  ModelParams* params_;
  std::vector<Var> vars_;
};

/// Hidden states [(batch*seq_len) x d]: token + position embeddings, then
/// post-norm blocks of masked self-attention and a GELU feed-forward.
/// Dropout draws from `rng` only in train mode with p > 0.
Var forward_encoder(Graph& g, const BoundModel& m, const Batch& batch, Mode mode, Rng* rng);

/// dense -> GELU -> layer norm -> vocabulary projection, for any rows of hidden states.
Var mlm_logits(Graph& g, const BoundModel& m, Var hidden);

/// Linear classifier on the first ([CLS]) position of each sequence.
Var cls_logits(Graph& g, const BoundModel& m, Var hidden, const Batch& batch);

/// Mean masked-LM cross-entropy. The head runs only on positions whose
/// label is not kIgnoreLabel; at least one such position is required.
Var mlm_loss(Graph& g, const BoundModel& m, Var hidden, std::span<const int> labels);

/// Eval-mode hidden states as a plain matrix.
Matrix encode_hidden(ModelParams& params, const Batch& batch);

}  // namespace trimix
