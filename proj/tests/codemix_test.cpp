#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "trimix/codemix/mixer.hpp"
#include "trimix/error.hpp"
#include "trimix/text/utf8.hpp"
#include "trimix/translit/translit.hpp"

using namespace trimix;

namespace {

const Lexicon& bundled_lexicon() {
  static const Lexicon lex = Lexicon::load(test::data_file("lexicon/en_bn_hi.tsv"));
  return lex;
}

std::vector<std::string> surfaces(const std::vector<WordToken>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.surface);
  return out;
}

// Sentences built only from lexicon words, so every word is substitutable.
std::vector<std::string> covered_lines(std::size_t words, std::uint64_t seed) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : bundled_lexicon().entries()) keys.push_back(k);
  Rng rng(seed);
  std::vector<std::string> lines;
  std::size_t made = 0;
  while (made < words) {
    std::string line;
    const auto n = 3 + rng.below(8);
    for (std::uint64_t i = 0; i < n && made < words; ++i, ++made) {
      if (!line.empty()) line += ' ';
      line += keys[rng.below(keys.size())];
    }
    line += '.';
    lines.push_back(line);
  }
  return lines;
}

bool contains_indic(std::string_view s) {
  for (std::size_t pos = 0, len = 0; pos < s.size(); pos += len) {
    const auto cp = utf8::decode(s, pos, len);
    if (cp >= 0x0900 && cp <= 0x09FF) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("word_tokenize") {
  CHECK(surfaces(word_tokenize("I love it!")) == std::vector<std::string>{"I", "love", "it", "!"});
  CHECK(word_tokenize("").empty());
  CHECK(word_tokenize("   ").empty());
  CHECK(surfaces(word_tokenize("don't stop")) == std::vector<std::string>{"don't", "stop"});
  CHECK(surfaces(word_tokenize("(great), ok")) == std::vector<std::string>{"(", "great", ")", ",", "ok"});
  const auto toks = word_tokenize("Wow... fine");
  CHECK(toks[0].kind == TokenKind::Word);
  CHECK(toks[1].kind == TokenKind::Punctuation);
}

TEST_CASE("lexicon loading") {
  const auto& lex = bundled_lexicon();
  CHECK(lex.size() > 150);
  REQUIRE(lex.find("love") != nullptr);
  CHECK(lex.find("Love") == nullptr);
  CHECK_THROWS_AS(Lexicon::parse("a\tb\n"), FormatError);
  CHECK_THROWS_AS(Lexicon::parse("two words\tক\tक\n"), FormatError);
  CHECK_THROWS_AS(Lexicon::parse("x\t\tक\n"), FormatError);
  const auto small = Lexicon::parse("# c\nDog\tকুকুর\tकुत्ता\n");
  CHECK(small.find("dog") != nullptr);
}

TEST_CASE("mix config validation") {
  CHECK_THROWS_AS((MixConfig{.ratio = 1.5}).validate(), ConfigError);
  CHECK_THROWS_AS((MixConfig{.bengali_weight = 0.0, .hindi_weight = 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS((MixConfig{.bengali_weight = -1.0}).validate(), ConfigError);
  CHECK_NOTHROW((MixConfig{}).validate());
}

TEST_CASE("ratio 0 is the identity on text") {
  const std::vector<std::string> lines{"I love this place!", "  Spaces   stay,\tput  ", "", "The food was good."};
  for (const auto& line : lines) {
    Rng rng(1);
    const auto mixed = mix_sentence(line, bundled_lexicon(), {.ratio = 0.0}, rng);
    CHECK(mixed.text == line);
    for (const auto& t : mixed.tokens) CHECK_FALSE(t.substituted);
  }
}

TEST_CASE("ratio 1 with Bengali-only weights substitutes every word") {
  Rng rng(3);
  const auto mixed = mix_sentence("I love good food", bundled_lexicon(), {.ratio = 1.0, .hindi_weight = 0.0}, rng);
  REQUIRE(mixed.tokens.size() == 4);
  const auto& bn = TransliterationTable::bundled(Language::Bengali);
  const std::vector<std::string> words{"i", "love", "good", "food"};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(mixed.tokens[i].substituted);
    CHECK(mixed.tokens[i].language == TokenLanguage::Bn);
    CHECK(utf8::ascii_lower(mixed.tokens[i].surface) == transliterate(bundled_lexicon().find(words[i])->bengali, bn));
  }
  CHECK(mixed.text == "Ami valobashi valo khabara");
}

TEST_CASE("seed 7 golden sentence") {
  std::ifstream in(test::golden("mix_seed7.txt"));
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    fields[line.substr(0, tab)] = line.substr(tab + 1);
  }
  REQUIRE(fields.count("input"));
  Rng rng(7);
  const auto mixed = mix_sentence(fields["input"], bundled_lexicon(), {.ratio = 0.5, .seed = 7}, rng);
  CHECK(mixed.text == fields["output"]);
  CHECK(mixed.substitutable == 4);
}

TEST_CASE("empty lexicon passes everything through") {
  const Lexicon empty;
  const auto corpus = mix_corpus({"I love food.", "Good day"}, empty, {.ratio = 1.0});
  CHECK(corpus.sentences[0].text == "I love food.");
  CHECK(corpus.stats.substitutable == 0);
  CHECK(corpus.stats.substituted == 0);
  CHECK(corpus.stats.word_tokens == 5);
}

TEST_CASE("corpus statistics concentrate around the ratio") {
  const auto lines = covered_lines(12000, 5);
  const auto corpus = mix_corpus(lines, bundled_lexicon(), {.ratio = 0.4, .seed = 11});
  REQUIRE(corpus.stats.substitutable >= 10000);
  CHECK(corpus.stats.substituted_fraction() >= 0.38);
  CHECK(corpus.stats.substituted_fraction() <= 0.42);
  CHECK(corpus.stats.bengali + corpus.stats.hindi == corpus.stats.substituted);

  // Monotone in the ratio.
  double prev = -1.0;
  for (double ratio : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto c = mix_corpus(lines, bundled_lexicon(), {.ratio = ratio, .seed = 11});
    CHECK(std::abs(c.stats.substituted_fraction() - ratio) <= 0.02);
    CHECK(c.stats.substituted_fraction() > prev);
    prev = c.stats.substituted_fraction();
  }
}

TEST_CASE("determinism and order independence") {
  const auto lines = covered_lines(3000, 9);
  const MixConfig cfg{.ratio = 0.5, .seed = 77};
  const auto a = mix_corpus(lines, bundled_lexicon(), cfg);
  const auto b = mix_corpus(lines, bundled_lexicon(), cfg, 4);
  std::vector<std::string> reversed(lines.rbegin(), lines.rend());
  REQUIRE(a.sentences.size() == b.sentences.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    CHECK(a.sentences[i].text == b.sentences[i].text);
    CHECK(to_jsonl(a.sentences[i]) == to_jsonl(b.sentences[i]));
    // Line i alone, run with its own stream index, reproduces the corpus output.
    Rng stream = Rng::stream(cfg.seed, i);
    CHECK(mix_sentence(lines[i], bundled_lexicon(), cfg, stream).text == a.sentences[i].text);
  }
  CHECK(a.stats.substituted == b.stats.substituted);
  const auto other = mix_corpus(lines, bundled_lexicon(), {.ratio = 0.5, .seed = 78});
  std::size_t differ = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) differ += other.sentences[i].text != a.sentences[i].text;
  CHECK(differ > 0);
}

TEST_CASE("token invariants: one tag, romanized substitutions") {
  const auto lines = covered_lines(2000, 13);
  const auto corpus = mix_corpus(lines, bundled_lexicon(), {.ratio = 0.6, .bengali_weight = 2.0, .seed = 3});
  for (const auto& s : corpus.sentences) {
    CHECK(render(s.tokens, s.trailing_space) == s.text);
    for (const auto& t : s.tokens) {
      if (t.substituted) {
        CHECK(t.language != TokenLanguage::En);
        CHECK_FALSE(contains_indic(t.surface));
      } else {
        CHECK(t.language == TokenLanguage::En);
      }
    }
  }
  // Bengali weight 2 vs Hindi weight 1.
  const double bn_share = static_cast<double>(corpus.stats.bengali) / static_cast<double>(corpus.stats.substituted);
  CHECK(bn_share == doctest::Approx(2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("jsonl and stats serialisation") {
  Rng rng(7);
  const auto mixed = mix_sentence("I love good food", bundled_lexicon(), {.ratio = 0.5}, rng);
  const auto rec = nlohmann::json::parse(to_jsonl(mixed));
  CHECK(rec["text"] == "I pyara good food");
  CHECK(rec["tokens"].size() == 4);
  CHECK(rec["tokens"][1]["lang"] == "hi");
  CHECK(rec["tokens"][1]["substituted"] == true);
  CHECK_FALSE(rec.contains("stats"));

  CorpusStats st;
  st.add(mixed);
  const auto js = nlohmann::json::parse(stats_json(st, {}));
  CHECK(js["substitutable"] == 4);
  CHECK(js["substituted"] == 1);
}

TEST_CASE("read_lines reports invalid UTF-8 with its line number") {
  const auto dir = test::scratch_dir("codemix_io");
  {
    std::ofstream out(dir / "bad.txt", std::ios::binary);
    out << "fine line\nsecond\nbroken \xff\xfe here\n";
  }
  try {
    read_lines(dir / "bad.txt");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  CHECK_THROWS_AS(read_lines(dir / "missing.txt"), FormatError);
}
