#include "trimix/codemix/lexicon.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "trimix/error.hpp"
#include "trimix/text/utf8.hpp"

namespace trimix {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cols;
}

bool has_space(std::string_view s) { return s.find_first_of(" \t\r\n\v\f") != std::string_view::npos; }

}  // namespace

void Lexicon::add(std::string english, Translation translation) {
  if (english.empty() || has_space(english)) throw ConfigError("lexicon key '" + english + "' must be a single token");
  if (translation.bengali.empty() || translation.hindi.empty()) {
    throw ConfigError("lexicon entry '" + english + "' has an empty translation");
  }
  entries_.insert_or_assign(utf8::ascii_lower(english), std::move(translation));
}

const Translation* Lexicon::find(std::string_view lower_word) const {
  const auto it = entries_.find(lower_word);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::parse(std::string_view tsv) {
  Lexicon lex;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": expected 3 columns, got " +
                        std::to_string(cols.size()));
    }
    try {
      lex.add(std::move(cols[0]), {std::move(cols[1]), std::move(cols[2])});
    } catch (const ConfigError& e) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open lexicon " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

}  // namespace trimix
