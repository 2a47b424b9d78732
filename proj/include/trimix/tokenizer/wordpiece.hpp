#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trimix {

namespace special {
inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kCls = 2;
inline constexpr int kSep = 3;
inline constexpr int kMask = 4;
inline constexpr int kCount = 5;
}  // namespace special

/// Subword vocabulary. Ids 0-4 are [PAD] [UNK] [CLS] [SEP] [MASK];
/// word-internal pieces carry a "##" prefix.
class Vocab {
 public:
  Vocab();
  /// Throws FormatError unless the specials lead and tokens are distinct.
  explicit Vocab(std::vector<std::string> tokens);

  static Vocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  /// One token per line; line number (from 0) is the id.
  std::string serialize() const;
  static Vocab parse(std::string_view text);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int id) const;
  /// -1 when absent.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const { return id(token) >= 0; }
  static bool is_special(int id) { return id >= 0 && id < special::kCount; }

  const std::vector<std::string>& tokens() const { return tokens_; }
  /// FNV-1a 64 of the serialized vocabulary, as 16 hex digits.
  std::string hash() const;

  /// Length in code points of the longest token (without "##").
  std::size_t max_piece_length() const { return max_piece_; }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> id_of_;
  std::size_t max_piece_ = 0;
};

struct WordPieceTrainerConfig {
  std::size_t vocab_size = 8000;
  std::size_t min_frequency = 2;
};

/// Greedy pair-merge vocabulary construction.
///
/// Words are lowercased and whitespace split; each starts as its first code
/// point followed by "##"-prefixed code points. The base alphabet holds both
/// forms of every code point seen. Merges repeatedly join the most frequent
/// adjacent pair (ties: smallest left, then right, in byte order) until the
/// vocabulary reaches `vocab_size` or the best pair is rarer than
/// `min_frequency`. Throws ConfigError if `vocab_size` < alphabet + 5.
Vocab train_wordpiece(std::span<const std::string> corpus, const WordPieceTrainerConfig& cfg);

struct Encoding {
  std::vector<int> ids;
  std::vector<unsigned char> attention;

  /// Count of non-padding positions.
  std::size_t length() const;
};

/// Lowercase, whitespace split, greedy longest-match-first pieces per word
/// (an untokenizable word becomes a single [UNK]), truncate to max_len - 2
/// pieces, wrap in [CLS] ... [SEP] and pad to exactly max_len.
Encoding encode(std::string_view text, const Vocab& vocab, std::size_t max_len);

/// Pieces for one word, or {[UNK]}.
std::vector<int> encode_word(std::string_view lower_word, const Vocab& vocab);

/// Drops specials, glues "##" pieces to their predecessor, joins words with
/// single spaces. Unknown ids raise FormatError.
std::string decode(std::span<const int> ids, const Vocab& vocab);

}  // namespace trimix
