#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace trimix {

struct LabeledExample {
  std::string text;
  int label = 0;
};

/// Ordered distinct label names; the index of a name is its label id.
class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int id) const;
  /// Throws FormatError for unknown names.
  int id(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

struct LabeledData {
  std::vector<LabeledExample> examples;
  LabelSpace labels;
};

enum class LabeledFormat { Jsonl, Csv };

/// Picks the format from the extension (.csv, otherwise JSON Lines).
LabeledFormat format_for(const std::filesystem::path& path);

/// Records carry "text" and "label"; the label space is the sorted set of
/// distinct label strings. Errors name the offending line.
LabeledData parse_labeled(std::string_view content, LabeledFormat format, std::string_view source_name = "input");
LabeledData load_labeled(const std::filesystem::path& path, LabeledFormat format);
LabeledData load_labeled(const std::filesystem::path& path);

/// Splits one CSV record (RFC 4180 quoting). `complete` is false while a quoted
/// field is still open at the end of `line`.
std::vector<std::string> parse_csv_record(std::string_view line, bool& complete);

struct SplitSpec {
  std::array<double, 3> fractions{0.6, 0.2, 0.2};
  std::uint64_t seed = 42;
};

template <typename T>
struct Splits {
  std::vector<T> train;
  std::vector<T> val;
  std::vector<T> test;
};

/// Seeded permutation of [0, n), cut at floor(f0*n) and floor((f0+f1)*n);
/// the remainder goes to the last part. Needs n >= 5.
Splits<std::size_t> split_indices(std::size_t n, const SplitSpec& spec);

template <typename T>
Splits<T> split(const std::vector<T>& items, const SplitSpec& spec) {
  const auto idx = split_indices(items.size(), spec);
  Splits<T> out;
  for (auto i : idx.train) out.train.push_back(items[i]);
  for (auto i : idx.val) out.val.push_back(items[i]);
  for (auto i : idx.test) out.test.push_back(items[i]);
  return out;
}

/// Pre-training text: one sentence per line, or the "text" field of each JSON
/// Lines record for .jsonl files. Native Bengali/Devanagari is romanized.
/// Blank lines are skipped.
std::vector<std::string> load_sentences(const std::filesystem::path& path);

}  // namespace trimix
