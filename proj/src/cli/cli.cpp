#include "trimix/cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "trimix/codemix/lexicon.hpp"
#include "trimix/codemix/mixer.hpp"
#include "trimix/corpus/corpus.hpp"
#include "trimix/error.hpp"
#include "trimix/model/checkpoint.hpp"
#include "trimix/training/trainer.hpp"
#include "trimix/translit/translit.hpp"

namespace trimix::cli {

namespace {

namespace fs = std::filesystem;

// Usage mistakes detected after parsing (bad combinations, bad config keys).
struct UsageError : Error {
  using Error::Error;
};

struct TranslitArgs {
  std::string in, out = "-", lang = "auto";
};

struct MixArgs {
  std::string in, out, stats;
  std::string lexicon = "data/lexicon/en_bn_hi.tsv";
  MixConfig mix;
};

struct TokArgs {
  std::vector<std::string> in;
  std::string out;
  WordPieceTrainerConfig tok;
};

struct ModelArgs {
  std::size_t max_len = 128, hidden = 128, layers = 2, heads = 4, ff_dim = 512;
  double dropout = 0.1;
  bool tie = false;
};

struct PretrainArgs {
  std::vector<std::string> train, val;
  double val_fraction = 0.1;
  std::string vocab, out_dir, from_checkpoint;
  ModelArgs model;
  TrainConfig train_cfg;
  MaskingConfig masking;
  std::size_t keep = 3;
  std::string wallclock = "on";
  std::string schedule = "linear";
};

struct FinetuneArgs {
  std::string data, checkpoint, vocab, out_dir;
  TrainConfig train_cfg;
  std::uint64_t split_seed = 42;
  std::string wallclock = "on";
  std::string schedule = "linear";
};

struct EvalArgs {
  std::string data, checkpoint, vocab, out, name = "model", split = "test";
  std::uint64_t split_seed = 42;
  std::size_t batch_size = 32;
  std::string wallclock = "on";
};

struct ReportArgs {
  std::vector<std::string> in;
  std::string out = "-", json;
};

struct Args {
  std::string config;
  TranslitArgs translit;
  MixArgs mix;
  TokArgs tok;
  PretrainArgs pretrain, mixed;
  FinetuneArgs finetune;
  EvalArgs eval;
  ReportArgs report;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write " + path);
  f << text;
  if (!f) throw FormatError("failed writing " + path);
}

bool wall_clock_on(const std::string& flag) { return flag == "on"; }

LrSchedule lr_schedule(const std::string& flag) {
  return flag == "constant" ? LrSchedule::Constant : LrSchedule::Linear;
}

void add_config_option(CLI::App* sub, std::string& target) {
  sub->add_option("--config", target, "key=value file; flags given on the command line take precedence");
}

void add_model_options(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--max-len", m.max_len, "maximum sequence length including [CLS] and [SEP]");
  sub->add_option("--hidden", m.hidden, "hidden size");
  sub->add_option("--layers", m.layers, "encoder layers");
  sub->add_option("--heads", m.heads, "attention heads");
  sub->add_option("--ff-dim", m.ff_dim, "feed-forward inner size");
  sub->add_option("--dropout", m.dropout, "dropout probability in training");
  sub->add_flag("--tie-mlm-output", m.tie, "reuse the token embeddings as the MLM output projection");
}

void add_train_options(CLI::App* sub, TrainConfig& t, std::string& wallclock, std::string& schedule) {
  sub->add_option("--lr", t.lr, "AdamW learning rate");
  sub->add_option("--lr-schedule", schedule, "constant, or linear decay to zero over the run")
      ->check(CLI::IsMember({"linear", "constant"}));
  sub->add_option("--weight-decay", t.weight_decay, "AdamW decoupled weight decay");
  sub->add_option("--max-grad-norm", t.max_grad_norm, "clip the global gradient norm before each step (0 disables)");
  sub->add_option("--batch-size", t.batch_size, "sequences per optimizer step");
  sub->add_option("--epochs", t.epochs, "training epochs");
  sub->add_option("--seed", t.seed, "run seed");
  sub->add_option("--wallclock", wallclock, "record elapsed time (off writes 0)")->check(CLI::IsMember({"on", "off"}));
}

void add_pretrain(CLI::App& app, const char* name, const char* about, PretrainArgs& p, std::string& config,
                  bool needs_checkpoint) {
  auto* sub = app.add_subcommand(name, about);
  add_config_option(sub, config);
  sub->add_option("--train", p.train, "training corpora (.txt, or .jsonl text field)")->required();
  sub->add_option("--val", p.val, "validation corpora; default holds out --val-fraction of --train");
  sub->add_option("--val-fraction", p.val_fraction, "held-out share of --train when --val is absent")
      ->check(CLI::Range(0.0, 0.5));
  sub->add_option("--vocab", p.vocab, "vocabulary file from tok-train")->required();
  sub->add_option("--out-dir", p.out_dir, "directory for checkpoints and history.jsonl")->required();
  auto* from = sub->add_option("--from-checkpoint", p.from_checkpoint, "checkpoint to continue from");
  if (needs_checkpoint) from->required();
  add_model_options(sub, p.model);
  add_train_options(sub, p.train_cfg, p.wallclock, p.schedule);
  sub->add_option("--mlm-probability", p.masking.mlm_probability, "share of tokens selected for prediction");
  sub->add_option("--keep-checkpoints", p.keep, "epoch checkpoints kept on disk");
}

CLI::App* build(CLI::App& app, Args& a) {
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  {
    auto* sub = app.add_subcommand("translit", "romanize Bengali or Devanagari text line by line");
    add_config_option(sub, a.config);
    sub->add_option("--in", a.translit.in, "input text file")->required();
    sub->add_option("--out", a.translit.out, "output file, - for stdout");
    sub->add_option("--lang", a.translit.lang, "source script")->check(CLI::IsMember({"auto", "bengali", "hindi"}));
  }
  {
    auto* sub = app.add_subcommand("mix", "synthesize English-Bengali-Hindi code-mixed text");
    add_config_option(sub, a.config);
    sub->add_option("--in", a.mix.in, "English seed: .txt sentences, or labeled .jsonl/.csv")->required();
    sub->add_option("--lexicon", a.mix.lexicon, "english<TAB>bengali<TAB>hindi word table");
    sub->add_option("--ratio", a.mix.mix.ratio, "probability of replacing a word that has a translation");
    sub->add_option("--bengali-weight", a.mix.mix.bengali_weight, "relative weight of Bengali replacements");
    sub->add_option("--hindi-weight", a.mix.mix.hindi_weight, "relative weight of Hindi replacements");
    sub->add_option("--seed", a.mix.mix.seed, "mixing seed");
    sub->add_option("--out", a.mix.out, "output .jsonl (labeled input may also write .csv)")->required();
    sub->add_option("--stats", a.mix.stats, "optional JSON file for substitution statistics");
  }
  {
    auto* sub = app.add_subcommand("tok-train", "train the subword vocabulary");
    add_config_option(sub, a.config);
    sub->add_option("--in", a.tok.in, "corpora (.txt, or .jsonl text field)")->required();
    sub->add_option("--vocab-size", a.tok.tok.vocab_size, "target vocabulary size including specials");
    sub->add_option("--min-frequency", a.tok.tok.min_frequency, "stop when the best pair is rarer than this");
    sub->add_option("--out", a.tok.out, "vocabulary file")->required();
  }
  add_pretrain(app, "pretrain", "tier-1 masked-LM pre-training", a.pretrain, a.config, false);
  a.mixed.train_cfg.epochs = 5;
  add_pretrain(app, "pretrain-mixed", "tier-2 masked-LM pre-training on code-mixed text", a.mixed, a.config, true);
  {
    auto* sub = app.add_subcommand("finetune", "train a classifier on a labeled task (60/20/20 split)");
    add_config_option(sub, a.config);
    sub->add_option("--data", a.finetune.data, "labeled .jsonl or .csv")->required();
    sub->add_option("--checkpoint", a.finetune.checkpoint, "pre-trained checkpoint")->required();
    sub->add_option("--vocab", a.finetune.vocab, "vocabulary file")->required();
    sub->add_option("--out-dir", a.finetune.out_dir, "directory for model.ckpt and history.jsonl")->required();
    add_train_options(sub, a.finetune.train_cfg, a.finetune.wallclock, a.finetune.schedule);
    sub->add_option("--split-seed", a.finetune.split_seed, "seed of the train/val/test split");
  }
  {
    auto* sub = app.add_subcommand("eval", "score a fine-tuned checkpoint on one split");
    add_config_option(sub, a.config);
    sub->add_option("--data", a.eval.data, "labeled .jsonl or .csv")->required();
    sub->add_option("--checkpoint", a.eval.checkpoint, "fine-tuned checkpoint")->required();
    sub->add_option("--vocab", a.eval.vocab, "vocabulary file")->required();
    sub->add_option("--split", a.eval.split, "which part of the split to score")
        ->check(CLI::IsMember({"train", "val", "test", "all"}));
    sub->add_option("--split-seed", a.eval.split_seed, "seed of the train/val/test split");
    sub->add_option("--batch-size", a.eval.batch_size, "sequences per forward pass");
    sub->add_option("--name", a.eval.name, "model name shown in reports");
    sub->add_option("--out", a.eval.out, "metrics JSON file")->required();
    sub->add_option("--wallclock", a.eval.wallclock, "record elapsed time (off writes 0)")
        ->check(CLI::IsMember({"on", "off"}));
  }
  {
    auto* sub = app.add_subcommand("report", "rank metrics files by weighted F1");
    add_config_option(sub, a.config);
    sub->add_option("--in", a.report.in, "metrics JSON files from eval")->required();
    sub->add_option("--out", a.report.out, "Markdown table, - for stdout");
    sub->add_option("--json", a.report.json, "optional JSON copy of the table");
  }
  return &app;
}

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Expands `--config FILE` for the chosen subcommand into ordinary arguments
// placed before the command-line ones; keys already on the command line are skipped.
std::vector<std::string> expand_config(CLI::App& app, const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands([](CLI::App*) { return true; })) {
    if (s->get_name() == args[1]) sub = s;
  }
  if (sub == nullptr) return args;

  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;

  std::vector<std::string> expanded{args[0], args[1]};
  std::istringstream in(read_text(path));
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    const CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw(flag);
    if (opt == nullptr) {
      throw UsageError(path + ":" + std::to_string(n) + ": unknown key '" + key + "' for " + sub->get_name());
    }
    if (given_on_command_line(rest, flag)) continue;
    if (opt->get_type_size_max() == 0) {
      if (value == "true") expanded.push_back(flag);
      else if (value != "false") throw UsageError(path + ":" + std::to_string(n) + ": " + key + " takes true or false");
      continue;
    }
    expanded.push_back(flag);
    std::istringstream vs(value);
    for (std::string v; vs >> v;) expanded.push_back(v);
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

std::vector<std::string> load_corpora(const std::vector<std::string>& paths) {
  std::vector<std::string> all;
  for (const auto& p : paths) {
    auto lines = load_sentences(p);
    all.insert(all.end(), std::make_move_iterator(lines.begin()), std::make_move_iterator(lines.end()));
  }
  return all;
}

LabeledData load_task(const std::string& path) {
  LabeledData data = load_labeled(path);
  for (auto& e : data.examples) e.text = romanize(e.text);
  return data;
}

Vocab load_vocab_checked(const std::string& path, const Checkpoint* ck, std::ostream& err) {
  Vocab vocab = Vocab::load(path);
  if (ck != nullptr && !ck->vocab_hash.empty() && ck->vocab_hash != vocab.hash()) {
    err << "warning: checkpoint was trained with vocabulary " << ck->vocab_hash << ", " << path << " hashes to "
        << vocab.hash() << "\n";
  }
  return vocab;
}

int cmd_translit(const TranslitArgs& a, std::ostream& out, std::ostream& err) {
  const auto lines = read_lines(a.in);
  std::string text;
  TransliterationStats stats;
  for (const auto& line : lines) {
    if (a.lang == "auto") {
      text += romanize(line);
    } else {
      text += transliterate(line, TransliterationTable::bundled(parse_language(a.lang)), &stats);
    }
    text += '\n';
  }
  write_text(a.out, text, out);
  if (stats.unknown > 0) err << "warning: " << stats.unknown << " code points had no rule and were copied\n";
  return kExitOk;
}

int cmd_mix(const MixArgs& a, std::ostream& out) {
  a.mix.validate();
  const Lexicon lexicon = Lexicon::load(a.lexicon);
  const fs::path in(a.in);
  const bool labeled = in.extension() == ".jsonl" || in.extension() == ".csv";

  std::vector<std::string> lines;
  LabeledData data;
  if (labeled) {
    data = load_labeled(in);
    for (const auto& e : data.examples) lines.push_back(e.text);
  } else {
    lines = read_lines(in);
  }
  const MixedCorpus mixed = mix_corpus(lines, lexicon, a.mix, thread_budget());

  std::string text;
  if (!labeled) {
    for (const auto& s : mixed.sentences) text += to_jsonl(s) + "\n";
  } else if (fs::path(a.out).extension() == ".csv") {
    text = "text,label\n";
    const auto quote = [](const std::string& s) {
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
      text += quote(mixed.sentences[i].text) + "," + quote(data.labels.name(data.examples[i].label)) + "\n";
    }
  } else {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      nlohmann::ordered_json j{{"text", mixed.sentences[i].text},
                               {"label", data.labels.name(data.examples[i].label)}};
      text += j.dump() + "\n";
    }
  }
  write_text(a.out, text, out);
  if (!a.stats.empty()) write_text(a.stats, stats_json(mixed.stats, a.mix), out);
  out << "mixed " << mixed.stats.sentences << " sentences, substituted " << mixed.stats.substituted << " of "
      << mixed.stats.substitutable << " translatable words (" << two_decimals(mixed.stats.substituted_fraction())
      << ")\n";
  return kExitOk;
}

int cmd_tok(const TokArgs& a, std::ostream& out) {
  const auto corpus = load_corpora(a.in);
  const Vocab vocab = train_wordpiece(corpus, a.tok);
  const fs::path p(a.out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  vocab.save(p);
  out << "vocabulary: " << vocab.size() << " tokens, hash " << vocab.hash() << "\n";
  return kExitOk;
}

int cmd_pretrain(const PretrainArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<Checkpoint> ck;
  if (!a.from_checkpoint.empty()) ck = load_checkpoint(a.from_checkpoint);
  const Vocab vocab = load_vocab_checked(a.vocab, ck ? &*ck : nullptr, err);

  std::vector<std::string> train = load_corpora(a.train);
  std::vector<std::string> val;
  if (!a.val.empty()) {
    val = load_corpora(a.val);
  } else {
    if (train.size() < 2) throw ConfigError("need at least 2 training sentences to hold out validation text");
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(purpose_seed(a.train_cfg.seed, 11));
    rng.shuffle(order.begin(), order.end());
    const auto held =
        std::max<std::size_t>(1, static_cast<std::size_t>(a.val_fraction * static_cast<double>(train.size())));
    std::vector<bool> is_val(train.size(), false);
    for (std::size_t i = 0; i < held; ++i) is_val[order[i]] = true;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < train.size(); ++i) (is_val[i] ? val : kept).push_back(train[i]);
    train = std::move(kept);
  }

  ModelParams model;
  if (ck) {
    model = std::move(ck->params);
  } else {
    EncoderConfig cfg{.vocab_size = vocab.size(),
                      .max_len = a.model.max_len,
                      .hidden = a.model.hidden,
                      .layers = a.model.layers,
                      .heads = a.model.heads,
                      .ff_dim = a.model.ff_dim,
                      .dropout = a.model.dropout,
                      .tie_mlm_output = a.model.tie};
    cfg.validate();
    Rng rng(purpose_seed(a.train_cfg.seed, 12));
    model = ModelParams::init(cfg, rng);
  }

  TrainConfig tc = a.train_cfg;
  tc.wall_clock = wall_clock_on(a.wallclock);
  tc.schedule = lr_schedule(a.schedule);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const auto history =
      pretrain(model, vocab, train, val, a.masking, tc, {.directory = dir, .vocab_hash = vocab.hash(), .keep = a.keep},
               [&](const EpochRecord& r) {
                 out << "epoch " << r.epoch << ": training_loss " << r.training_loss << ", validation_loss "
                     << r.validation_loss << ", perplexity " << r.perplexity << "\n";
               });
  save_checkpoint(model, vocab.hash(), dir / "model.ckpt");
  write_text((dir / "history.jsonl").string(), history_jsonl(history), out);
  return kExitOk;
}

Splits<LabeledExample> task_splits(const LabeledData& data, std::uint64_t seed) {
  return split(data.examples, SplitSpec{.seed = seed});
}

int cmd_finetune(const FinetuneArgs& a, std::ostream& out, std::ostream& err) {
  Checkpoint ck = load_checkpoint(a.checkpoint);
  const Vocab vocab = load_vocab_checked(a.vocab, &ck, err);
  const LabeledData data = load_task(a.data);
  const auto parts = task_splits(data, a.split_seed);
  if (!ck.labels.empty() && ck.labels != data.labels.names()) {
    throw ConfigError("checkpoint labels do not match the labels in " + a.data);
  }

  TrainConfig tc = a.train_cfg;
  tc.wall_clock = wall_clock_on(a.wallclock);
  tc.schedule = lr_schedule(a.schedule);
  const auto result = finetune(std::move(ck.params), vocab, parts.train, parts.val, data.labels.size(), tc,
                               [&](const FinetuneRecord& r) {
                                 out << "epoch " << r.epoch << ": training_loss " << r.training_loss
                                     << ", validation_accuracy " << r.validation_accuracy << "\n";
                               });
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  save_checkpoint(result.best, vocab.hash(), dir / "model.ckpt", data.labels.names());
  write_text((dir / "history.jsonl").string(), history_jsonl(result.history), out);
  out << "best validation accuracy at epoch " << result.best_epoch << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  Checkpoint ck = load_checkpoint(a.checkpoint);
  const Vocab vocab = load_vocab_checked(a.vocab, &ck, err);
  LabeledData data = load_task(a.data);
  if (ck.labels.empty()) throw ConfigError(a.checkpoint + " has no classification labels; run finetune first");
  const LabelSpace labels(ck.labels);
  // Re-map ids through names so the checkpoint's label order is authoritative.
  for (auto& e : data.examples) e.label = labels.id(data.labels.name(e.label));

  std::vector<LabeledExample> chosen;
  if (a.split == "all") {
    chosen = data.examples;
  } else {
    const auto parts = task_splits(data, a.split_seed);
    chosen = a.split == "train" ? parts.train : a.split == "val" ? parts.val : parts.test;
  }
  MetricsReport report = evaluate(ck.params, vocab, chosen, labels, a.batch_size);
  report.name = a.name;
  if (wall_clock_on(a.wallclock)) {
    report.wall_minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  }
  write_text(a.out, report_json(report), out);
  out << a.name << ": accuracy " << two_decimals(report.accuracy) << ", weighted F1 "
      << two_decimals(report.weighted_f1) << "\n";
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<MetricsReport> reports;
  for (const auto& p : a.in) {
    MetricsReport r = parse_report_json(read_text(p), p);
    if (r.name.empty()) r.name = fs::path(p).stem().string();
    reports.push_back(std::move(r));
  }
  const ComparisonTable table = compare_reports(std::move(reports));
  write_text(a.out, table.markdown, out);
  if (!a.json.empty()) write_text(a.json, table.json, out);
  return kExitOk;
}

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("TRIMIX_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app("Tri-lingual code-mixed text synthesis and masked-LM workbench", "trimix");
  Args a;
  build(app, a);

  std::vector<std::string> args = args_in.empty() ? std::vector<std::string>{"trimix"} : args_in;
  try {
    args = expand_config(app, args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string& name = sub->get_name();
    if (name == "translit") return cmd_translit(a.translit, out, err);
    if (name == "mix") return cmd_mix(a.mix, out);
    if (name == "tok-train") return cmd_tok(a.tok, out);
    if (name == "pretrain") return cmd_pretrain(a.pretrain, out, err);
    if (name == "pretrain-mixed") return cmd_pretrain(a.mixed, out, err);
    if (name == "finetune") return cmd_finetune(a.finetune, out, err);
    if (name == "eval") return cmd_eval(a.eval, out, err);
    if (name == "report") return cmd_report(a.report, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace trimix::cli
