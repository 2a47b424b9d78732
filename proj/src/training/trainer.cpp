#include "trimix/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "trimix/error.hpp"
#include "trimix/model/checkpoint.hpp"
#include "trimix/numeric/adamw.hpp"
#include "trimix/numeric/ops.hpp"

namespace trimix {

namespace {

enum Purpose : std::uint64_t { kShuffle = 1, kMask = 2, kDropout = 3, kValidationMask = 4, kHead = 5 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0, bool enabled) {
  if (!enabled) return 0.0;
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<ParamRef> optimizer_params(ModelParams& model) {
  std::vector<ParamRef> refs;
  for (auto& e : model.entries()) refs.push_back({e.name, &e.tensor, !is_decay_exempt(e.name)});
  return refs;
}

AdamWConfig adamw_config(const TrainConfig& cfg) {
  AdamWConfig a;
  a.lr = cfg.lr;
  a.weight_decay = cfg.weight_decay;
  a.max_grad_norm = cfg.max_grad_norm;
  return a;
}

std::vector<Encoding> encode_all(std::span<const std::string> texts, const Vocab& vocab, std::size_t max_len) {
  std::vector<Encoding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(encode(t, vocab, max_len));
  return out;
}

std::vector<Encoding> encode_all(std::span<const LabeledExample> examples, const Vocab& vocab, std::size_t max_len) {
  std::vector<Encoding> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(encode(e.text, vocab, max_len));
  return out;
}

// Masked rows of one minibatch, trimmed to its longest sequence.
struct MlmBatch {
  Batch batch;
  std::vector<int> labels;
  bool any_target = false;
};

MlmBatch mask_batch(std::span<const Encoding> encodings, std::span<const std::size_t> rows, const Vocab& vocab,
                    const MaskingConfig& masking, std::uint64_t stream_seed, std::uint64_t stream_offset) {
  std::size_t len = 1;
  for (auto r : rows) len = std::max(len, encodings[r].length());
  MlmBatch out;
  out.batch.batch = rows.size();
  out.batch.seq_len = len;
  for (auto r : rows) {
    Rng rng = Rng::stream(stream_seed, stream_offset + r);
    const MaskedSequence m = apply_mlm_masking(encodings[r], vocab, masking, rng);
    out.batch.ids.insert(out.batch.ids.end(), m.ids.begin(), m.ids.begin() + static_cast<std::ptrdiff_t>(len));
    out.batch.attention.insert(out.batch.attention.end(), encodings[r].attention.begin(),
                               encodings[r].attention.begin() + static_cast<std::ptrdiff_t>(len));
    out.labels.insert(out.labels.end(), m.labels.begin(), m.labels.begin() + static_cast<std::ptrdiff_t>(len));
    if (m.selected() > 0) out.any_target = true;
  }
  return out;
}

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(purpose_seed(seed, kShuffle), epoch);
  rng.shuffle(order.begin(), order.end());
  return order;
}

nlohmann::ordered_json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ConfigError("weight_decay must be non-negative");
  if (!(max_grad_norm >= 0.0) || !std::isfinite(max_grad_norm)) throw ConfigError("max_grad_norm must be non-negative");
}

double scheduled_lr(const TrainConfig& cfg, std::size_t k, std::size_t total) {
  if (cfg.schedule == LrSchedule::Constant) return cfg.lr;
  if (k >= total) throw ConfigError("schedule step " + std::to_string(k) + " past the end of " + std::to_string(total));
  return cfg.lr * static_cast<double>(total - k) / static_cast<double>(total);
}

double perplexity(double validation_loss) { return std::exp(validation_loss); }

Batch make_batch(std::span<const Encoding* const> rows) {
  std::size_t len = 1;
  for (const auto* e : rows) len = std::max(len, e->length());
  Batch b;
  b.batch = rows.size();
  b.seq_len = len;
  for (const auto* e : rows) {
    b.ids.insert(b.ids.end(), e->ids.begin(), e->ids.begin() + static_cast<std::ptrdiff_t>(len));
    b.attention.insert(b.attention.end(), e->attention.begin(), e->attention.begin() + static_cast<std::ptrdiff_t>(len));
  }
  return b;
}

double mlm_validation_loss(ModelParams& model, const Vocab& vocab, std::span<const std::string> val,
                           const MaskingConfig& masking, std::size_t batch_size, std::uint64_t seed) {
  const auto encodings = encode_all(val, vocab, model.config().max_len);
  double total = 0.0;
  std::size_t batches = 0;
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < encodings.size(); start += batch_size) {
    rows.clear();
    for (std::size_t i = start; i < std::min(start + batch_size, encodings.size()); ++i) rows.push_back(i);
    const MlmBatch mb = mask_batch(encodings, rows, vocab, masking, seed, 0);
    if (!mb.any_target) continue;
    Graph g;
    BoundModel m(g, model);
    const Var loss = mlm_loss(g, m, forward_encoder(g, m, mb.batch, Mode::Eval, nullptr), mb.labels);
    total += g.value(loss)(0, 0);
    ++batches;
  }
  if (batches == 0) throw ConfigError("validation corpus produced no masked positions");
  return total / static_cast<double>(batches);
}

std::vector<EpochRecord> pretrain(ModelParams& model, const Vocab& vocab, std::span<const std::string> train,
                                  std::span<const std::string> val, const MaskingConfig& masking,
                                  const TrainConfig& cfg, const CheckpointPolicy& checkpoints,
                                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  masking.validate();
  if (train.empty()) throw ConfigError("pre-training corpus is empty");
  if (val.empty()) throw ConfigError("validation corpus is empty");
  if (model.config().vocab_size != vocab.size()) {
    throw ConfigError("model vocab_size " + std::to_string(model.config().vocab_size) + " differs from the " +
                      std::to_string(vocab.size()) + "-token vocabulary");
  }
  if (!checkpoints.directory.empty()) std::filesystem::create_directories(checkpoints.directory);

  const auto encodings = encode_all(train, vocab, model.config().max_len);
  model.set_trainable(true);
  AdamW opt(optimizer_params(model), adamw_config(cfg));
  opt.zero_grad();
  const std::size_t per_epoch = (encodings.size() + cfg.batch_size - 1) / cfg.batch_size;

  std::vector<EpochRecord> history;
  std::size_t step = 0;
  std::vector<std::size_t> rows;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    const auto order = shuffled(encodings.size(), cfg.seed, epoch);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      rows.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(std::min(start + cfg.batch_size, order.size())));
      const MlmBatch mb = mask_batch(encodings, rows, vocab, masking, purpose_seed(cfg.seed, kMask),
                                     static_cast<std::uint64_t>(epoch) << 32);
      if (!mb.any_target) continue;
      ++step;
      Graph g;
      BoundModel m(g, model);
      Rng dropout_rng = Rng::stream(purpose_seed(cfg.seed, kDropout), step);
      const Var loss = mlm_loss(g, m, forward_encoder(g, m, mb.batch, Mode::Train, &dropout_rng), mb.labels);
      const double value = g.value(loss)(0, 0);
      if (!std::isfinite(value)) throw NumericError("non-finite training loss at step " + std::to_string(step));
      g.backward(loss);
      opt.set_lr(scheduled_lr(cfg, (epoch - 1) * per_epoch + start / cfg.batch_size, per_epoch * cfg.epochs));
      opt.step();
      opt.zero_grad();
      loss_sum += value;
      ++steps;
    }
    if (steps == 0) throw ConfigError("training corpus produced no masked positions");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.training_loss = loss_sum / static_cast<double>(steps);
    if (cfg.eval_each_epoch || epoch == cfg.epochs) {
      rec.validation_loss =
          mlm_validation_loss(model, vocab, val, masking, cfg.batch_size, purpose_seed(cfg.seed, kValidationMask));
      rec.perplexity = perplexity(rec.validation_loss);
    } else {
      rec.validation_loss = rec.perplexity = std::nan("");
    }
    rec.wall_seconds = seconds_since(t0, cfg.wall_clock);

    if (!checkpoints.directory.empty()) {
      const auto name = [&](std::size_t e) {
        return checkpoints.directory / ("checkpoint-epoch-" + std::to_string(e) + ".ckpt");
      };
      save_checkpoint(model, checkpoints.vocab_hash, name(epoch));
      if (checkpoints.keep > 0 && epoch > checkpoints.keep) std::filesystem::remove(name(epoch - checkpoints.keep));
    }
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return history;
}

std::vector<int> predict(ModelParams& model, const Vocab& vocab, std::span<const LabeledExample> examples,
                         std::size_t batch_size) {
  const auto encodings = encode_all(examples, vocab, model.config().max_len);
  std::vector<int> out;
  out.reserve(encodings.size());
  std::vector<const Encoding*> rows;
  for (std::size_t start = 0; start < encodings.size(); start += batch_size) {
    rows.clear();
    for (std::size_t i = start; i < std::min(start + batch_size, encodings.size()); ++i) rows.push_back(&encodings[i]);
    const Batch b = make_batch(rows);
    Graph g;
    BoundModel m(g, model);
    const Matrix& z = g.value(cls_logits(g, m, forward_encoder(g, m, b, Mode::Eval, nullptr), b));
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      Eigen::Index best = 0;
      z.row(r).maxCoeff(&best);
      out.push_back(static_cast<int>(best));
    }
  }
  return out;
}

FinetuneResult finetune(ModelParams model, const Vocab& vocab, std::span<const LabeledExample> train,
                        std::span<const LabeledExample> val, std::size_t label_count, const TrainConfig& cfg,
                        const std::function<void(const FinetuneRecord&)>& on_epoch) {
  cfg.validate();
  if (train.empty() || val.empty()) throw ConfigError("fine-tuning needs non-empty train and validation splits");
  if (model.config().label_count == 0) {
    Rng head = Rng::stream(purpose_seed(cfg.seed, kHead), 0);
    model.attach_classifier(label_count, head);
  } else if (model.config().label_count != label_count) {
    throw ConfigError("model head has " + std::to_string(model.config().label_count) + " labels but the data has " +
                      std::to_string(label_count));
  }
  for (auto split : {train, val}) {
    for (const auto& e : split) {
      if (e.label < 0 || static_cast<std::size_t>(e.label) >= label_count) {
        throw ConfigError("label id " + std::to_string(e.label) + " outside [0, " + std::to_string(label_count) + ")");
      }
    }
  }

  const auto encodings = encode_all(train, vocab, model.config().max_len);
  model.set_trainable(true);
  AdamW opt(optimizer_params(model), adamw_config(cfg));
  opt.zero_grad();
  const std::size_t per_epoch = (encodings.size() + cfg.batch_size - 1) / cfg.batch_size;

  FinetuneResult result;
  double best_accuracy = -1.0;
  std::size_t step = 0;
  std::vector<const Encoding*> rows;
  std::vector<int> labels;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    const auto order = shuffled(encodings.size(), cfg.seed, epoch);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      rows.clear();
      labels.clear();
      for (std::size_t i = start; i < std::min(start + cfg.batch_size, order.size()); ++i) {
        rows.push_back(&encodings[order[i]]);
        labels.push_back(train[order[i]].label);
      }
      const Batch b = make_batch(rows);
      ++step;
      Graph g;
      BoundModel m(g, model);
      Rng dropout_rng = Rng::stream(purpose_seed(cfg.seed, kDropout), step);
      const Var loss =
          softmax_cross_entropy(g, cls_logits(g, m, forward_encoder(g, m, b, Mode::Train, &dropout_rng), b), labels);
      const double value = g.value(loss)(0, 0);
      if (!std::isfinite(value)) throw NumericError("non-finite training loss at step " + std::to_string(step));
      g.backward(loss);
      opt.set_lr(scheduled_lr(cfg, (epoch - 1) * per_epoch + start / cfg.batch_size, per_epoch * cfg.epochs));
      opt.step();
      opt.zero_grad();
      loss_sum += value;
      ++steps;
    }

    const auto predicted = predict(model, vocab, val);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.size(); ++i) correct += predicted[i] == val[i].label ? 1 : 0;

    FinetuneRecord rec;
    rec.epoch = epoch;
    rec.training_loss = loss_sum / static_cast<double>(steps);
    rec.validation_accuracy = static_cast<double>(correct) / static_cast<double>(val.size());
    rec.wall_seconds = seconds_since(t0, cfg.wall_clock);
    if (rec.validation_accuracy > best_accuracy) {
      best_accuracy = rec.validation_accuracy;
      result.best = model;
      result.best_epoch = epoch;
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.best.zero_grad();
  return result;
}

MetricsReport evaluate(ModelParams& model, const Vocab& vocab, std::span<const LabeledExample> test,
                       const LabelSpace& labels, std::size_t batch_size) {
  if (test.empty()) throw ConfigError("test split is empty");
  if (model.config().label_count != labels.size()) {
    throw ConfigError("model head has " + std::to_string(model.config().label_count) + " labels, label space has " +
                      std::to_string(labels.size()));
  }
  std::vector<int> truth;
  truth.reserve(test.size());
  for (const auto& e : test) truth.push_back(e.label);
  const auto predicted = predict(model, vocab, test, batch_size);
  return metrics_from_confusion(confusion_matrix(truth, predicted, labels.size()), labels.names());
}

std::string history_jsonl(std::span<const EpochRecord> history) {
  std::string out;
  for (const auto& r : history) {
    nlohmann::ordered_json j{{"epoch", r.epoch},
                             {"training_loss", finite_or_null(r.training_loss)},
                             {"validation_loss", finite_or_null(r.validation_loss)},
                             {"perplexity", finite_or_null(r.perplexity)},
                             {"wall_seconds", r.wall_seconds}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string history_jsonl(std::span<const FinetuneRecord> history) {
  std::string out;
  for (const auto& r : history) {
    nlohmann::ordered_json j{{"epoch", r.epoch},
                             {"training_loss", finite_or_null(r.training_loss)},
                             {"validation_accuracy", r.validation_accuracy},
                             {"wall_seconds", r.wall_seconds}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace trimix
