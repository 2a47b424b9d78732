#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trimix/corpus/corpus.hpp"
#include "trimix/model/encoder.hpp"
#include "trimix/tokenizer/wordpiece.hpp"
#include "trimix/training/masking.hpp"
#include "trimix/training/metrics.hpp"

namespace trimix {

enum class LrSchedule { Constant, Linear };

struct TrainConfig {
  double lr = 5e-5;
  /// Linear decays to zero over every planned minibatch of the run.
  LrSchedule schedule = LrSchedule::Linear;
  double weight_decay = 0.01;
  /// Global gradient-norm clip; 0 disables.
  double max_grad_norm = 1.0;
  std::size_t batch_size = 16;
  std::size_t epochs = 3;
  bool eval_each_epoch = true;
  std::uint64_t seed = 42;
  /// Record elapsed seconds/minutes; off writes 0 so artifacts are byte-stable.
  bool wall_clock = true;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  /// Mean MLM loss over the epoch's optimizer steps.
  double training_loss = 0.0;
  double validation_loss = 0.0;
  double perplexity = 0.0;
  double wall_seconds = 0.0;
};

/// Learning rate for update `k` (from 0) of `total`: constant, or
/// lr * (total - k) / total.
double scheduled_lr(const TrainConfig& cfg, std::size_t k, std::size_t total);

/// exp(validation_loss).
double perplexity(double validation_loss);

struct CheckpointPolicy {
  /// Empty: no checkpoints are written.
  std::filesystem::path directory;
  std::string vocab_hash;
  std::size_t keep = 3;
};

/// Masked-LM training. Each epoch shuffles the training set, takes AdamW
/// steps on minibatches and then scores the validation set in eval mode with
/// masks that are identical in every epoch. Writes checkpoint-epoch-N.ckpt
/// after each epoch and deletes all but the newest `keep`. Throws
/// NumericError naming the step if the loss becomes non-finite.
std::vector<EpochRecord> pretrain(ModelParams& model, const Vocab& vocab, std::span<const std::string> train,
                                  std::span<const std::string> val, const MaskingConfig& masking,
                                  const TrainConfig& cfg, const CheckpointPolicy& checkpoints = {},
                                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Mean eval-mode MLM loss over batches of `val`, masked with streams derived from `seed`.
double mlm_validation_loss(ModelParams& model, const Vocab& vocab, std::span<const std::string> val,
                           const MaskingConfig& masking, std::size_t batch_size, std::uint64_t seed);

struct FinetuneRecord {
  std::size_t epoch = 0;
  double training_loss = 0.0;
  double validation_accuracy = 0.0;
  double wall_seconds = 0.0;
};

struct FinetuneResult {
  /// Weights from the epoch with the best validation accuracy (earliest on ties).
  ModelParams best;
  std::size_t best_epoch = 0;
  std::vector<FinetuneRecord> history;
};

/// Cross-entropy training of the classifier and encoder. A model without a
/// head gets a freshly initialised one; an existing head must already have
/// `label_count` outputs or ConfigError is thrown.
FinetuneResult finetune(ModelParams model, const Vocab& vocab, std::span<const LabeledExample> train,
                        std::span<const LabeledExample> val, std::size_t label_count, const TrainConfig& cfg,
                        const std::function<void(const FinetuneRecord&)>& on_epoch = {});

/// Argmax class per text, eval mode.
std::vector<int> predict(ModelParams& model, const Vocab& vocab, std::span<const LabeledExample> examples,
                         std::size_t batch_size = 32);

/// Predictions on `test` scored against its labels. Throws ConfigError on an
/// empty set or when the model head and label space disagree.
MetricsReport evaluate(ModelParams& model, const Vocab& vocab, std::span<const LabeledExample> test,
                       const LabelSpace& labels, std::size_t batch_size = 32);

std::string history_jsonl(std::span<const EpochRecord> history);
std::string history_jsonl(std::span<const FinetuneRecord> history);

/// Batch of encodings trimmed to the longest non-padded sequence.
Batch make_batch(std::span<const Encoding* const> rows);

}  // namespace trimix
