#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "trimix/error.hpp"
#include "trimix/model/checkpoint.hpp"
#include "trimix/model/encoder.hpp"
#include "trimix/numeric/gradcheck.hpp"
#include "trimix/numeric/ops.hpp"

using namespace trimix;

namespace {

EncoderConfig tiny_config() {
  return {.vocab_size = 8, .max_len = 5, .hidden = 3, .layers = 1, .heads = 1, .ff_dim = 4, .dropout = 0.0};
}

// Same closed-form fill as tests/oracle/forward_tiny.py.
ModelParams hand_set(const EncoderConfig& cfg) {
  ModelParams p = ModelParams::zeros(cfg);
  std::size_t t = 0;
  for (auto& e : p.entries()) {
    std::size_t k = 0;
    for (double& x : e.tensor.data()) {
      x = static_cast<double>(static_cast<long>((t * 31 + k * 17) % 11) - 5) / 10.0;
      ++k;
    }
    ++t;
  }
  return p;
}

std::vector<std::vector<double>> read_golden_block(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (in.peek() != '#' && std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    for (double v; ls >> v;) row.push_back(v);
    rows.push_back(row);
  }
  return rows;
}

Batch toy_batch() {
  // Two sentences, the second padded.
  return {.batch = 2,
          .seq_len = 5,
          .ids = {2, 6, 7, 8, 3, 2, 9, 3, 0, 0},
          .attention = {1, 1, 1, 1, 1, 1, 1, 1, 0, 0}};
}

EncoderConfig toy_config() {
  return {.vocab_size = 10, .max_len = 6, .hidden = 4, .layers = 2, .heads = 2, .ff_dim = 6, .dropout = 0.0,
          .label_count = 3};
}

ModelParams toy_params(std::uint64_t seed) {
  Rng rng(seed);
  ModelParams p = ModelParams::init(toy_config(), rng);
  // Larger weights than the 0.02 init so every path carries a visible gradient.
  for (auto& e : p.entries()) {
    for (double& x : e.tensor.data()) x += 0.4 * rng.normal();
  }
  return p;
}

std::vector<Tensor*> all_tensors(ModelParams& p) {
  std::vector<Tensor*> out;
  for (auto& e : p.entries()) out.push_back(&e.tensor);
  return out;
}

}  // namespace

TEST_CASE("forward: one layer, one head matches the committed hand computation") {
  const auto cfg = tiny_config();
  ModelParams p = hand_set(cfg);
  const Batch batch{.batch = 1, .seq_len = 5, .ids = {2, 5, 7, 3, 0}, .attention = {1, 1, 1, 1, 0}};

  std::ifstream in(test::golden("forward_tiny.txt"));
  REQUIRE(in);
  std::string header;
  std::getline(in, header);
  const auto hidden_ref = read_golden_block(in);
  std::getline(in, header);
  const auto logits_ref = read_golden_block(in);
  REQUIRE(hidden_ref.size() == 5);
  REQUIRE(logits_ref.size() == 5);

  Graph g;
  BoundModel m(g, p);
  const Var h = forward_encoder(g, m, batch, Mode::Eval, nullptr);
  const Matrix& hv = g.value(h);
  const Matrix& zv = g.value(mlm_logits(g, m, h));
  REQUIRE(hv.rows() == 5);
  REQUIRE(hv.cols() == 3);
  REQUIRE(zv.cols() == 8);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(hv(r, c) == doctest::Approx(hidden_ref[r][c]).epsilon(1e-12));
    for (int c = 0; c < 8; ++c) CHECK(zv(r, c) == doctest::Approx(logits_ref[r][c]).epsilon(1e-12));
  }
}

TEST_CASE("forward: shapes and padding invariance") {
  ModelParams p = toy_params(3);
  Batch batch = toy_batch();
  const Matrix base = encode_hidden(p, batch);
  CHECK(base.rows() == 10);
  CHECK(base.cols() == 4);

  Batch changed = batch;
  changed.ids[8] = 5;
  changed.ids[9] = 7;
  const Matrix other = encode_hidden(p, changed);
  for (int r = 0; r < 10; ++r) {
    if (batch.attention[static_cast<std::size_t>(r)] == 0) continue;
    CHECK((other.row(r) - base.row(r)).cwiseAbs().maxCoeff() == 0.0);
  }

  // Classifier logits read only the first position, so padded ids never reach them.
  Graph g1, g2;
  BoundModel m1(g1, p), m2(g2, p);
  const Matrix z1 = g1.value(cls_logits(g1, m1, forward_encoder(g1, m1, batch, Mode::Eval, nullptr), batch));
  const Matrix z2 = g2.value(cls_logits(g2, m2, forward_encoder(g2, m2, changed, Mode::Eval, nullptr), changed));
  CHECK(z1.rows() == 2);
  CHECK(z1.cols() == 3);
  CHECK(z1 == z2);
}

TEST_CASE("forward: eval mode is pure and train mode dropout follows the rng") {
  EncoderConfig cfg = toy_config();
  cfg.dropout = 0.3;
  Rng init(5);
  ModelParams p = ModelParams::init(cfg, init);
  const Batch batch = toy_batch();

  Rng rng(9);
  const Rng before = rng;
  Graph g;
  BoundModel m(g, p);
  const Matrix e1 = g.value(forward_encoder(g, m, batch, Mode::Eval, &rng));
  const Matrix e2 = g.value(forward_encoder(g, m, batch, Mode::Eval, &rng));
  CHECK(e1 == e2);
  Rng probe = before;
  CHECK(rng.next_u64() == probe.next_u64());

  Rng r1(21), r2(21);
  const Matrix t1 = g.value(forward_encoder(g, m, batch, Mode::Train, &r1));
  const Matrix t2 = g.value(forward_encoder(g, m, batch, Mode::Train, &r2));
  CHECK(t1 == t2);
  CHECK(t1 != e1);
  CHECK_THROWS_AS(forward_encoder(g, m, batch, Mode::Train, nullptr), ConfigError);
}

TEST_CASE("forward: invalid ids and lengths are rejected") {
  ModelParams p = toy_params(3);
  Batch bad = toy_batch();
  bad.ids[1] = 10;
  CHECK_THROWS_AS(encode_hidden(p, bad), DimensionError);

  Batch too_long{.batch = 1, .seq_len = 7, .ids = std::vector<int>(7, 5), .attention = std::vector<unsigned char>(7, 1)};
  CHECK_THROWS_AS(encode_hidden(p, too_long), DimensionError);
}

TEST_CASE("config: invariants") {
  EncoderConfig cfg = toy_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.heads = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = toy_config();
  cfg.max_len = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = toy_config();
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  // Desk defaults and full DistilBERT geometry are both accepted.
  EncoderConfig desk{.vocab_size = 8000};
  CHECK_NOTHROW(desk.validate());
  EncoderConfig full{.vocab_size = 30522, .max_len = 512, .hidden = 768, .layers = 6, .heads = 12, .ff_dim = 3072};
  CHECK_NOTHROW(full.validate());
}

TEST_CASE("params: manifest order, init statistics and decay exemptions") {
  Rng rng(1);
  EncoderConfig cfg{.vocab_size = 300, .max_len = 16, .hidden = 32, .layers = 2, .heads = 4, .ff_dim = 64};
  ModelParams p = ModelParams::init(cfg, rng);
  CHECK(p.entries().front().name == "embeddings.token");
  CHECK(p.entries()[1].name == "embeddings.position");
  CHECK(p.entries().back().name == "mlm.output.bias");
  CHECK_FALSE(p.contains("classifier.weight"));
  CHECK(p.at("layers.1.ffn.in.weight").shape() == Shape{32, 64});
  CHECK(p.all_finite());

  const auto& emb = p.at("embeddings.token").matrix();
  const double mean = emb.mean();
  const double sd = std::sqrt((emb.array() - mean).square().mean());
  CHECK(std::abs(mean) < 0.002);
  CHECK(sd == doctest::Approx(0.02).epsilon(0.05));
  CHECK(p.at("layers.0.attention_norm.gamma").matrix().isOnes());
  CHECK(p.at("layers.0.attention.query.bias").matrix().isZero());

  CHECK(is_decay_exempt("layers.0.ffn.in.bias"));
  CHECK(is_decay_exempt("mlm.norm.gamma"));
  CHECK_FALSE(is_decay_exempt("layers.0.ffn.in.weight"));

  p.attach_classifier(4, rng);
  CHECK(p.config().label_count == 4);
  CHECK(p.at("classifier.weight").shape() == Shape{32, 4});
  p.attach_classifier(2, rng);
  CHECK(p.at("classifier.bias").shape() == Shape{2});

  EncoderConfig tied = cfg;
  tied.tie_mlm_output = true;
  CHECK_FALSE(ModelParams::zeros(tied).contains("mlm.output.weight"));
}

TEST_CASE("gradients: encoder + MLM loss on a two-sentence batch") {
  ModelParams p = toy_params(7);
  const Batch batch = toy_batch();
  const std::vector<int> labels{-1, 6, -1, 8, -1, -1, 9, -1, -1, -1};
  auto result = finite_diff_check(
      [&](Graph& g) {
        BoundModel m(g, p);
        return mlm_loss(g, m, forward_encoder(g, m, batch, Mode::Eval, nullptr), labels);
      },
      all_tensors(p));
  MESSAGE("encoder+mlm relative error " << result.max_relative_error);
  CHECK(result.entries == p.scalar_count());
  CHECK(result.analytic_norm > 0.0);
  CHECK(result.max_relative_error < 1e-5);
}

TEST_CASE("gradients: encoder + classifier loss, and a tied MLM head") {
  ModelParams p = toy_params(8);
  const Batch batch = toy_batch();
  const std::vector<int> labels{2, 0};
  auto cls = finite_diff_check(
      [&](Graph& g) {
        BoundModel m(g, p);
        return softmax_cross_entropy(
            g, cls_logits(g, m, forward_encoder(g, m, batch, Mode::Eval, nullptr), batch), labels);
      },
      all_tensors(p));
  CHECK(cls.max_relative_error < 1e-5);

  EncoderConfig tied_cfg = toy_config();
  tied_cfg.tie_mlm_output = true;
  Rng rng(4);
  ModelParams tied = ModelParams::init(tied_cfg, rng);
  for (auto& e : tied.entries()) {
    for (double& x : e.tensor.data()) x += 0.4 * rng.normal();
  }
  const std::vector<int> mlm{-1, 6, -1, -1, -1, -1, 4, -1, -1, -1};
  auto t = finite_diff_check(
      [&](Graph& g) {
        BoundModel m(g, tied);
        return mlm_loss(g, m, forward_encoder(g, m, batch, Mode::Eval, nullptr), mlm);
      },
      all_tensors(tied));
  CHECK(t.max_relative_error < 1e-5);
}

TEST_CASE("checkpoint: roundtrip is bit-identical") {
  ModelParams p = toy_params(11);
  const std::string hash = "0123456789abcdef";
  const std::vector<std::string> labels{"a", "b", "c"};
  const auto dir = test::scratch_dir("model_ckpt");
  save_checkpoint(p, hash, dir / "m.ckpt", labels);
  const Checkpoint ck = load_checkpoint(dir / "m.ckpt");
  CHECK(ck.vocab_hash == hash);
  CHECK(ck.labels == labels);
  CHECK(ck.params.config() == p.config());
  REQUIRE(ck.params.entries().size() == p.entries().size());
  for (std::size_t i = 0; i < p.entries().size(); ++i) {
    const auto a = p.entries()[i].tensor.data();
    const auto b = ck.params.entries()[i].tensor.data();
    CHECK(ck.params.entries()[i].name == p.entries()[i].name);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  }
  CHECK(checkpoint_bytes(ck.params, ck.vocab_hash, ck.labels) == test::read_file(dir / "m.ckpt"));

  const std::string bytes = test::read_file(dir / "m.ckpt");
  CHECK(bytes.substr(0, 5) == "MDBT1");
}

TEST_CASE("checkpoint: corrupt files raise format errors") {
  ModelParams p = toy_params(11);
  const std::string bytes = checkpoint_bytes(p, "h");
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS(parse_checkpoint(bad_magic), doctest::Contains("bad magic"), FormatError);
  CHECK_THROWS_WITH_AS(parse_checkpoint(bytes.substr(0, bytes.size() - 3)), doctest::Contains("truncated"),
                       FormatError);
  CHECK_THROWS_WITH_AS(parse_checkpoint(bytes.substr(0, 20)), doctest::Contains("truncated"), FormatError);
  CHECK_THROWS_AS(parse_checkpoint(bytes + "x"), FormatError);
  CHECK_THROWS_AS(load_checkpoint(test::scratch_dir("model_missing") / "none.ckpt"), FormatError);
}
