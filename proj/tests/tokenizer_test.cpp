#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "trimix/corpus/corpus.hpp"
#include "trimix/error.hpp"
#include "trimix/tokenizer/wordpiece.hpp"

using namespace trimix;

namespace {

std::string normalize(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

std::vector<std::string> fixture_corpus() {
  std::vector<std::string> lines;
  for (const char* name : {"corpora/tier1_en.txt", "corpora/tier1_bn.txt", "corpora/tier1_hi.txt", "corpora/yelp_seed.txt"}) {
    auto part = load_sentences(test::data_file(name));
    lines.insert(lines.end(), part.begin(), part.end());
  }
  return lines;
}

}  // namespace

TEST_CASE("merge loop: hand run on 'aaaa aaaa'") {
  const std::vector<std::string> corpus{"aaaa aaaa"};
  // Base: [PAD] [UNK] [CLS] [SEP] [MASK] ##a a  (7 entries).
  // Word "aaaa" (freq 2) = a ##a ##a ##a; pair counts (a,##a)=2, (##a,##a)=4.
  // Merge 1: ##a+##a -> ##aa, word = a ##aa ##a.
  // Merge 2: (a,##aa)=2 ties (##aa,##a)=2; "##aa" < "a" so ##aa+##a -> ##aaa.
  // Merge 3: a+##aaa -> aaaa.
  const auto v8 = train_wordpiece(corpus, {.vocab_size = 8, .min_frequency = 1});
  CHECK(v8.tokens() == std::vector<std::string>{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "##a", "a", "##aa"});

  const auto v10 = train_wordpiece(corpus, {.vocab_size = 10, .min_frequency = 1});
  CHECK(v10.size() == 10);
  CHECK(v10.id("##aa") == 7);
  CHECK(v10.id("##aaa") == 8);
  CHECK(v10.id("aaaa") == 9);
  CHECK(v10.id("##aa") < v10.id("##aaa"));

  // No more pairs once every word is one piece.
  CHECK(train_wordpiece(corpus, {.vocab_size = 50, .min_frequency = 1}).size() == 10);
  // min_frequency above every pair count stops before any merge.
  CHECK(train_wordpiece(corpus, {.vocab_size = 50, .min_frequency = 5}).size() == 7);

  CHECK_THROWS_AS(train_wordpiece(corpus, {.vocab_size = 6, .min_frequency = 1}), ConfigError);
  CHECK_THROWS_AS(train_wordpiece(std::vector<std::string>{}, {}), ConfigError);
}

TEST_CASE("vocabulary covers the alphabet and hits the requested size") {
  const auto corpus = fixture_corpus();
  const auto vocab = train_wordpiece(corpus, {.vocab_size = 400, .min_frequency = 1});
  CHECK(vocab.size() == 400);
  for (const auto& line : corpus) {
    for (char c : normalize(line)) {
      if (c == ' ') continue;
      CHECK(vocab.contains(std::string(1, c)));
      CHECK(vocab.contains("##" + std::string(1, c)));
    }
  }
  // Deterministic given the same corpus and parameters.
  CHECK(train_wordpiece(corpus, {.vocab_size = 400, .min_frequency = 1}).tokens() == vocab.tokens());
}

TEST_CASE("encode: shapes, specials and padding") {
  const auto vocab = train_wordpiece(std::vector<std::string>{"play playing played", "ing x"}, {.vocab_size = 60, .min_frequency = 1});
  const auto empty = encode("", vocab, 6);
  CHECK(empty.ids == std::vector<int>{special::kCls, special::kSep, 0, 0, 0, 0});
  CHECK(empty.attention == std::vector<unsigned char>{1, 1, 0, 0, 0, 0});

  const auto one = encode("PLAY", vocab, 5);
  REQUIRE(vocab.contains("play"));
  CHECK(one.ids == std::vector<int>{special::kCls, vocab.id("play"), special::kSep, 0, 0});
  CHECK(one.length() == 3);

  const auto unk = encode("zzz play", vocab, 8);
  CHECK(unk.ids[1] == special::kUnk);

  const auto cut = encode("play play play play play", vocab, 5);
  CHECK(cut.ids.size() == 5);
  CHECK(cut.ids.back() == special::kSep);
  CHECK(cut.length() == 5);

  CHECK_THROWS_AS(encode("x", vocab, 2), ConfigError);
}

TEST_CASE("decode") {
  Vocab vocab({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "x", "play", "##ing"});
  CHECK(decode(std::vector<int>{2, 5, 3, 0}, vocab) == "x");
  CHECK(decode(std::vector<int>{2, 6, 7, 3}, vocab) == "playing");
  CHECK(decode(std::vector<int>{2, 3, 0, 0}, vocab) == "");
  CHECK(decode(std::vector<int>{2, 6, 5, 3}, vocab) == "play x");
  CHECK_THROWS_AS(decode(std::vector<int>{2, 99}, vocab), FormatError);
}

TEST_CASE("roundtrip over the fixture corpus") {
  const auto corpus = fixture_corpus();
  const auto vocab = train_wordpiece(corpus, {.vocab_size = 600, .min_frequency = 2});
  std::size_t checked = 0;
  for (const auto& line : corpus) {
    const auto enc = encode(line, vocab, 256);
    CHECK(enc.ids.size() == 256);
    if (std::find(enc.ids.begin(), enc.ids.end(), special::kUnk) != enc.ids.end()) continue;
    CHECK(decode(enc.ids, vocab) == normalize(line));
    ++checked;
  }
  CHECK(checked == corpus.size());
}

TEST_CASE("vocab file roundtrip and validation") {
  const auto vocab = train_wordpiece(std::vector<std::string>{"hello world", "help"}, {.vocab_size = 30, .min_frequency = 1});
  const auto dir = test::scratch_dir("tokenizer");
  vocab.save(dir / "vocab.txt");
  const auto again = Vocab::load(dir / "vocab.txt");
  CHECK(again.tokens() == vocab.tokens());
  CHECK(again.hash() == vocab.hash());
  CHECK(test::read_file(dir / "vocab.txt") == vocab.serialize());
  CHECK(vocab.hash().size() == 16);

  CHECK_THROWS_AS(Vocab::parse("[PAD]\n[UNK]\n[CLS]\n[SEP]\n"), FormatError);
  CHECK_THROWS_AS(Vocab::parse("[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\nx\nx\n"), FormatError);
  CHECK_THROWS_AS(Vocab::load(dir / "absent.txt"), FormatError);
}
