#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trimix {

enum class Language { Bengali, Hindi };

std::string_view language_name(Language lang);
/// Accepts "bn"/"bengali" and "hi"/"hindi" (case-insensitive).
Language parse_language(std::string_view name);

struct TransliterationRule {
  std::string source;  ///< UTF-8 grapheme cluster in the native script
  std::string latin;   ///< lowercase ASCII letters, possibly empty (signs)
};

/// Ordered longest-match-first romanization rules for one script.
///
/// Rules are kept sorted by source length in code points, descending, with
/// ties in byte order. Loading rejects duplicates and non-letter outputs.
class TransliterationTable {
 public:
  TransliterationTable(Language lang, std::vector<TransliterationRule> rules);

  /// TSV text: `source<TAB>latin` per line, '#' starts a comment line.
  static TransliterationTable parse(Language lang, std::string_view tsv);
  static TransliterationTable load(Language lang, const std::filesystem::path& path);
  /// Table compiled into the library.
  static const TransliterationTable& bundled(Language lang);

  Language language() const { return lang_; }
  const std::vector<TransliterationRule>& rules() const { return rules_; }

  /// Longest rule whose source is a prefix of `text.substr(pos)`, or nullptr.
  const TransliterationRule* match(std::string_view text, std::size_t pos) const;

  /// Code point belongs to this script's Unicode block.
  bool in_block(char32_t cp) const;
  /// Consonant letters take the inherent vowel.
  bool is_consonant(char32_t cp) const;
  /// Dependent vowel signs and the virama suppress the inherent vowel.
  bool suppresses_inherent_vowel(char32_t cp) const;

 private:
  Language lang_;
  std::vector<TransliterationRule> rules_;
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
};

struct TransliterationStats {
  /// Source-script code points with no rule; copied through unchanged.
  std::size_t unknown = 0;
};

/// Left-to-right longest-match romanization.
///
/// A rule whose source ends in a consonant emits an extra "a" unless the next
/// code point is a vowel sign or virama. Native digits map to ASCII digits
/// and the danda marks to '.'. Everything outside the source script passes
/// through unchanged, so Latin input is a fixed point.
std::string transliterate(std::string_view text, const TransliterationTable& table,
                          TransliterationStats* stats = nullptr);

/// Script of the first Bengali or Devanagari code point in `text`, if any.
bool detect_indic_script(std::string_view text, Language& lang);

/// Romanizes any Bengali or Devanagari runs with the bundled tables.
std::string romanize(std::string_view text);

}  // namespace trimix
