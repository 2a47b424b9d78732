#include "trimix/corpus/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trimix/error.hpp"
#include "trimix/numeric/rng.hpp"
#include "trimix/translit/translit.hpp"

namespace trimix {

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string label_string(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw FormatError(where + ": \"label\" must be a string");
}

struct RawRecord {
  std::string text;
  std::string label;
};

LabeledData finish(std::vector<RawRecord> raw, std::string_view source_name) {
  if (raw.empty()) throw FormatError(std::string(source_name) + ": no records");
  std::set<std::string> distinct;
  for (const auto& r : raw) distinct.insert(r.label);
  LabeledData data{{}, LabelSpace({distinct.begin(), distinct.end()})};
  data.examples.reserve(raw.size());
  for (auto& r : raw) data.examples.push_back({std::move(r.text), data.labels.id(r.label)});
  return data;
}

std::vector<RawRecord> parse_jsonl(std::string_view content, std::string_view source_name) {
  std::vector<RawRecord> raw;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!rec.is_object() || !rec.contains("text") || !rec.contains("label")) {
      throw FormatError(where + ": record needs \"text\" and \"label\" fields");
    }
    if (!rec["text"].is_string()) throw FormatError(where + ": \"text\" must be a string");
    raw.push_back({rec["text"].get<std::string>(), label_string(rec["label"], where)});
  }
  return raw;
}

std::vector<RawRecord> parse_csv(std::string_view content, std::string_view source_name) {
  std::vector<RawRecord> raw;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  int text_col = -1;
  int label_col = -1;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start_line = line_no;
    std::string record = line;
    bool complete = false;
    auto fields = parse_csv_record(record, complete);
    while (!complete) {
      if (!std::getline(in, line)) {
        throw FormatError(std::string(source_name) + ":" + std::to_string(start_line) + ": unterminated quoted field");
      }
      ++line_no;
      record += "\n" + line;
      fields = parse_csv_record(record, complete);
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') fields.back().pop_back();
    const std::string where = std::string(source_name) + ":" + std::to_string(start_line);
    if (text_col < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "text") text_col = static_cast<int>(i);
        if (fields[i] == "label") label_col = static_cast<int>(i);
      }
      if (text_col < 0 || label_col < 0) throw FormatError(where + ": header must name text and label columns");
      width = fields.size();
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) {
      throw FormatError(where + ": expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    }
    raw.push_back({fields[static_cast<std::size_t>(text_col)], fields[static_cast<std::size_t>(label_col)]});
  }
  if (text_col < 0) throw FormatError(std::string(source_name) + ": empty file");
  return raw;
}

}  // namespace

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("label space is empty");
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != names_.size()) throw ConfigError("label space has duplicate names");
}

const std::string& LabelSpace::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) throw ConfigError("label id out of range");
  return names_[static_cast<std::size_t>(id)];
}

int LabelSpace::id(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw FormatError("unknown label '" + std::string(name) + "'");
  return static_cast<int>(it - names_.begin());
}

std::vector<std::string> parse_csv_record(std::string_view line, bool& complete) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  complete = !quoted;
  return fields;
}

LabeledFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? LabeledFormat::Csv : LabeledFormat::Jsonl;
}

LabeledData parse_labeled(std::string_view content, LabeledFormat format, std::string_view source_name) {
  auto raw = format == LabeledFormat::Csv ? parse_csv(content, source_name) : parse_jsonl(content, source_name);
  return finish(std::move(raw), source_name);
}

LabeledData load_labeled(const std::filesystem::path& path, LabeledFormat format) {
  return parse_labeled(read_all(path), format, path.string());
}

LabeledData load_labeled(const std::filesystem::path& path) { return load_labeled(path, format_for(path)); }

Splits<std::size_t> split_indices(std::size_t n, const SplitSpec& spec) {
  const auto& f = spec.fractions;
  if (f[0] < 0 || f[1] < 0 || f[2] < 0 || std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
  if (n < 5) throw ConfigError("split needs at least 5 examples, got " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(perm.begin(), perm.end());
  const auto cut1 = static_cast<std::size_t>(std::floor(f[0] * static_cast<double>(n)));
  const auto cut2 = static_cast<std::size_t>(std::floor((f[0] + f[1]) * static_cast<double>(n)));
  Splits<std::size_t> out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cut1));
  out.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(cut1), perm.begin() + static_cast<std::ptrdiff_t>(cut2));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(cut2), perm.end());
  return out;
}

std::vector<std::string> load_sentences(const std::filesystem::path& path) {
  const bool jsonl = path.extension() == ".jsonl";
  std::istringstream in(read_all(path));
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (jsonl) {
      try {
        const auto rec = nlohmann::json::parse(line);
        line = rec.at("text").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    out.push_back(romanize(line));
  }
  if (out.empty()) throw FormatError(path.string() + ": no sentences");
  return out;
}

}  // namespace trimix
