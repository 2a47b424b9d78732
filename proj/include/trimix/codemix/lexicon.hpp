#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace trimix {

struct Translation {
  std::string bengali;  ///< native script
  std::string hindi;    ///< native script
};

/// English -> (Bengali, Hindi) word table driving substitution.
class Lexicon {
 public:
  Lexicon() = default;

  /// TSV with columns english, bengali, hindi; '#' comment lines.
  static Lexicon parse(std::string_view tsv);
  static Lexicon load(const std::filesystem::path& path);

  /// Keys are lowercased on insert; throws ConfigError on whitespace keys or empty values.
  void add(std::string english, Translation translation);

  /// Lookup by lowercase key.
  const Translation* find(std::string_view lower_word) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, Translation, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, Translation, std::less<>> entries_;
};

}  // namespace trimix
