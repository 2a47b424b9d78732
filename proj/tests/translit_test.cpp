#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "trimix/error.hpp"
#include "trimix/text/utf8.hpp"
#include "trimix/translit/translit.hpp"

using namespace trimix;

namespace {

bool has_block_code_point(const std::string& s, const TransliterationTable& table) {
  for (std::size_t pos = 0, len = 0; pos < s.size(); pos += len) {
    if (table.in_block(utf8::decode(s, pos, len))) return true;
  }
  return false;
}

// Random strings over the table's own sources, mixed with spaces and Latin.
std::string random_native(const TransliterationTable& table, Rng& rng, int pieces) {
  std::string s;
  for (int i = 0; i < pieces; ++i) {
    const auto roll = rng.below(10);
    if (roll == 0) {
      s += ' ';
    } else if (roll == 1) {
      s += "ok";
    } else {
      s += table.rules()[rng.below(table.rules().size())].source;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("bundled tables satisfy the table invariants") {
  for (auto lang : {Language::Bengali, Language::Hindi}) {
    const auto& table = TransliterationTable::bundled(lang);
    CHECK(table.rules().size() >= 80);
    std::size_t prev = 1000;
    for (const auto& rule : table.rules()) {
      const auto len = utf8::count_code_points(rule.source);
      CHECK(len <= prev);
      prev = len;
      for (char c : rule.latin) CHECK((c >= 'a' && c <= 'z'));
    }
    // The file on disk is what got compiled in.
    const auto path = test::data_file(lang == Language::Bengali ? "translit/bengali.tsv" : "translit/hindi.tsv");
    CHECK(TransliterationTable::load(lang, path).rules().size() == table.rules().size());
  }
}

TEST_CASE("latin text passes through unchanged") {
  for (auto lang : {Language::Bengali, Language::Hindi}) {
    CHECK(transliterate("hello 123!", TransliterationTable::bundled(lang)) == "hello 123!");
  }
}

TEST_CASE("bengali hand-walked examples") {
  const auto& bn = TransliterationTable::bundled(Language::Bengali);
  // আ -> a ; ম followed by the i-sign -> m (no inherent vowel) ; ি -> i
  CHECK(transliterate("আমি", bn) == "ami");
  // ত + inherent a, ো -> o sign after ম, া sign after ক, ে sign: "tomake"
  CHECK(transliterate("তোমাকে", bn) == "tomake");
  // ভ -> v, ো, ল, া, ব + inherent? no: া follows ব ; স -> sh ; ি
  CHECK(transliterate("ভালোবাসি", bn) == "valobashi");
  // hasanta suppresses the vowel and maps to nothing
  CHECK(transliterate("ক্ত", bn) == "kta");
  // precomposed and decomposed o-sign agree
  CHECK(transliterate("\u0995\u09CB", bn) == transliterate("\u0995\u09C7\u09BE", bn));
  CHECK(transliterate("১২।", bn) == "12.");
}

TEST_CASE("hindi hand-walked examples") {
  const auto& hi = TransliterationTable::bundled(Language::Hindi);
  CHECK(transliterate("अच्छा", hi) == "accha");
  CHECK(transliterate("नहीं", hi) == "nahin");
  CHECK(transliterate("\u0958", hi) == "qa");
  CHECK(transliterate("\u0915\u093C", hi) == "qa");
  CHECK(transliterate("मैं", hi) == "main");
}

TEST_CASE("unknown source-script code points pass through and are tallied") {
  const auto& bn = TransliterationTable::bundled(Language::Bengali);
  TransliterationStats stats;
  // U+09FA (isshar) has no rule.
  CHECK(transliterate("a৺b", bn, &stats) == "a৺b");
  CHECK(stats.unknown == 1);
}

TEST_CASE("table loading rejects malformed input") {
  CHECK_THROWS_AS(TransliterationTable::parse(Language::Hindi, "क\tk\nक\tq\n"), FormatError);
  CHECK_THROWS_AS(TransliterationTable::parse(Language::Hindi, "क\tK\n"), FormatError);
  CHECK_THROWS_AS(TransliterationTable::parse(Language::Hindi, "क k\n"), FormatError);
  auto t = TransliterationTable::parse(Language::Hindi, "# comment\nक\tk\nक्ष\tksh\n");
  REQUIRE(t.rules().size() == 2);
  CHECK(t.rules()[0].latin == "ksh");
}

TEST_CASE("properties: block-free output, idempotence, longest match locality") {
  Rng rng(2024);
  for (auto lang : {Language::Bengali, Language::Hindi}) {
    const auto& table = TransliterationTable::bundled(lang);
    for (int trial = 0; trial < 300; ++trial) {
      const auto s = random_native(table, rng, 12);
      const auto once = transliterate(s, table);
      CHECK_FALSE(has_block_code_point(once, table));
      CHECK(transliterate(once, table) == once);
    }
  }

  // Adding a longer rule does not affect text that lacks its source.
  const auto& hi = TransliterationTable::bundled(Language::Hindi);
  auto rules = hi.rules();
  rules.push_back({"क्त", "kkt"});  // क्त
  const TransliterationTable extended(Language::Hindi, rules);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = random_native(hi, rng, 10);
    if (s.find("क्त") != std::string::npos) continue;
    CHECK(transliterate(s, extended) == transliterate(s, hi));
  }
}

TEST_CASE("romanize handles both scripts in one line") {
  CHECK(romanize("আমি and मैं") == "ami and main");
  Language lang{};
  CHECK_FALSE(detect_indic_script("plain", lang));
  CHECK(parse_language("BN") == Language::Bengali);
  CHECK_THROWS_AS(parse_language("ta"), ConfigError);
}
