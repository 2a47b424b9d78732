#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trimix/codemix/lexicon.hpp"
#include "trimix/numeric/rng.hpp"

namespace trimix {

enum class TokenLanguage { En, Bn, Hi };
std::string_view token_language_code(TokenLanguage lang);

enum class TokenKind { Word, Punctuation };

struct WordToken {
  std::string surface;
  TokenKind kind = TokenKind::Word;
  /// Whitespace that preceded the token in the source text.
  std::string space_before;
};

/// Whitespace split with leading/trailing punctuation peeled off into
/// separate one-character tokens. Internal punctuation ("don't") stays.
std::vector<WordToken> word_tokenize(std::string_view text);

struct MixConfig {
  double ratio = 0.5;
  double bengali_weight = 1.0;
  double hindi_weight = 1.0;
  std::uint64_t seed = 42;

  /// Throws ConfigError on ratio outside [0,1] or bad weights.
  void validate() const;
};

struct MixedToken {
  std::string surface;
  TokenLanguage language = TokenLanguage::En;
  bool substituted = false;
  std::string space_before;
  TokenKind kind = TokenKind::Word;
};

struct MixedSentence {
  std::vector<MixedToken> tokens;
  std::string text;
  std::string trailing_space;
  /// Word tokens that had a lexicon entry.
  std::size_t substitutable = 0;
};

/// Concatenates tokens with their recorded spacing.
std::string render(const std::vector<MixedToken>& tokens, std::string_view trailing_space = {});

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t word_tokens = 0;
  std::size_t substitutable = 0;
  std::size_t substituted = 0;
  std::size_t english = 0;
  std::size_t bengali = 0;
  std::size_t hindi = 0;

  double substituted_fraction() const {
    return substitutable == 0 ? 0.0 : static_cast<double>(substituted) / static_cast<double>(substitutable);
  }
  CorpusStats& operator+=(const CorpusStats& other);
  void add(const MixedSentence& sentence);
};

/// Random per-word code-mixing of one English sentence.
///
/// Each word with a lexicon entry draws u = stream.uniform(); when u < ratio a
/// second uniform v picks Bengali if v * (w_bn + w_hi) < w_bn, else Hindi, and
/// the word is replaced by the romanized translation (initial capital kept).
/// Words without entries and punctuation draw nothing and stay English.
MixedSentence mix_sentence(std::string_view sentence, const Lexicon& lexicon, const MixConfig& cfg, Rng& stream);

struct MixedCorpus {
  std::vector<MixedSentence> sentences;
  CorpusStats stats;
};

/// Mixes every line; line i uses Rng::stream(cfg.seed, i), so the result does
/// not depend on the order or thread count used to process lines.
MixedCorpus mix_corpus(const std::vector<std::string>& lines, const Lexicon& lexicon, const MixConfig& cfg,
                       unsigned threads = 1);

/// Reads one sentence per line. Throws FormatError naming the line on invalid UTF-8.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// {"text": ..., "tokens": [{"surface","lang","substituted"}...]} per line.
std::string to_jsonl(const MixedSentence& sentence);
std::string stats_json(const CorpusStats& stats, const MixConfig& cfg);

}  // namespace trimix
