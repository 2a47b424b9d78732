#include "trimix/translit/translit.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "trimix/error.hpp"
#include "trimix/text/utf8.hpp"

namespace trimix {

namespace bundled_tables {
extern const char* const kBengali;
extern const char* const kHindi;
}  // namespace bundled_tables

namespace {

struct ScriptRanges {
  char32_t block_first;
  char32_t block_last;
  char32_t consonant_first;
  char32_t consonant_last;
  std::vector<std::pair<char32_t, char32_t>> extra_consonants;
  std::vector<std::pair<char32_t, char32_t>> suppressors;  // vowel signs + virama
  char32_t digit_zero;
};

const ScriptRanges& ranges(Language lang) {
  static const ScriptRanges bengali{0x0980, 0x09FF, 0x0995, 0x09B9, {{0x09DC, 0x09DD}, {0x09DF, 0x09DF}, {0x09F0, 0x09F1}},
                                    {{0x09BE, 0x09CD}, {0x09D7, 0x09D7}, {0x09E2, 0x09E3}}, 0x09E6};
  static const ScriptRanges devanagari{0x0900, 0x097F, 0x0915, 0x0939, {{0x0958, 0x095F}},
                                       {{0x093A, 0x093B}, {0x093E, 0x094F}, {0x0955, 0x0957}, {0x0962, 0x0963}}, 0x0966};
  return lang == Language::Bengali ? bengali : devanagari;
}

bool in_any(char32_t cp, const std::vector<std::pair<char32_t, char32_t>>& spans) {
  return std::any_of(spans.begin(), spans.end(), [cp](auto s) { return cp >= s.first && cp <= s.second; });
}

char32_t first_code_point(std::string_view s) {
  std::size_t len = 0;
  return utf8::decode(s, 0, len);
}

char32_t last_code_point(std::string_view s) {
  char32_t cp = 0;
  for (std::size_t pos = 0, len = 0; pos < s.size(); pos += len) cp = utf8::decode(s, pos, len);
  return cp;
}

constexpr char32_t kDanda = 0x0964;
constexpr char32_t kDoubleDanda = 0x0965;

}  // namespace

std::string_view language_name(Language lang) { return lang == Language::Bengali ? "bengali" : "hindi"; }

Language parse_language(std::string_view name) {
  const auto lower = utf8::ascii_lower(name);
  if (lower == "bn" || lower == "bengali" || lower == "bangla") return Language::Bengali;
  if (lower == "hi" || lower == "hindi") return Language::Hindi;
  throw ConfigError("unknown language '" + std::string(name) + "' (expected bn or hi)");
}

TransliterationTable::TransliterationTable(Language lang, std::vector<TransliterationRule> rules)
    : lang_(lang), rules_(std::move(rules)) {
  std::set<std::string> seen;
  for (const auto& r : rules_) {
    if (r.source.empty()) throw FormatError("transliteration rule with empty source");
    if (!seen.insert(r.source).second) throw FormatError("duplicate transliteration source '" + r.source + "'");
    for (char c : r.latin) {
      if (c < 'a' || c > 'z') {
        throw FormatError("transliteration output '" + r.latin + "' is not lowercase ASCII letters");
      }
    }
  }
  std::stable_sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) {
    const auto la = utf8::count_code_points(a.source);
    const auto lb = utf8::count_code_points(b.source);
    return la != lb ? la > lb : a.source < b.source;
  });
  for (std::size_t i = 0; i < rules_.size(); ++i) by_first_[first_code_point(rules_[i].source)].push_back(i);
}

TransliterationTable TransliterationTable::parse(Language lang, std::string_view tsv) {
  std::vector<TransliterationRule> rules;
  std::size_t line_no = 0;
  std::istringstream in{std::string(tsv)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("transliteration table line " + std::to_string(line_no) + ": expected two tab-separated columns");
    }
    rules.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return TransliterationTable(lang, std::move(rules));
}

TransliterationTable TransliterationTable::load(Language lang, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open transliteration table " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(lang, os.str());
}

const TransliterationTable& TransliterationTable::bundled(Language lang) {
  static const TransliterationTable bengali = parse(Language::Bengali, bundled_tables::kBengali);
  static const TransliterationTable hindi = parse(Language::Hindi, bundled_tables::kHindi);
  return lang == Language::Bengali ? bengali : hindi;
}

const TransliterationRule* TransliterationTable::match(std::string_view text, std::size_t pos) const {
  std::size_t len = 0;
  const auto it = by_first_.find(utf8::decode(text, pos, len));
  if (it == by_first_.end()) return nullptr;
  for (auto idx : it->second) {
    const auto& src = rules_[idx].source;
    if (text.compare(pos, src.size(), src) == 0) return &rules_[idx];
  }
  return nullptr;
}

bool TransliterationTable::in_block(char32_t cp) const {
  const auto& r = ranges(lang_);
  return cp >= r.block_first && cp <= r.block_last;
}

bool TransliterationTable::is_consonant(char32_t cp) const {
  const auto& r = ranges(lang_);
  return (cp >= r.consonant_first && cp <= r.consonant_last) || in_any(cp, r.extra_consonants);
}

bool TransliterationTable::suppresses_inherent_vowel(char32_t cp) const { return in_any(cp, ranges(lang_).suppressors); }

std::string transliterate(std::string_view text, const TransliterationTable& table, TransliterationStats* stats) {
  const auto& r = ranges(table.language());
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto* rule = table.match(text, pos)) {
      out += rule->latin;
      pos += rule->source.size();
      // Nukta after the consonant is part of the cluster for vowel purposes.
      char32_t tail = last_code_point(rule->source);
      if (tail == 0x09BC || tail == 0x093C) {
        std::string_view src = rule->source;
        tail = utf8::count_code_points(src) > 1 ? first_code_point(src) : tail;
      }
      if (table.is_consonant(tail)) {
        std::size_t len = 0;
        const char32_t next = pos < text.size() ? utf8::decode(text, pos, len) : 0;
        if (!table.suppresses_inherent_vowel(next)) out.push_back('a');
      }
      continue;
    }
    std::size_t len = 0;
    const char32_t cp = utf8::decode(text, pos, len);
    if (cp >= r.digit_zero && cp <= r.digit_zero + 9) {
      out.push_back(static_cast<char>('0' + (cp - r.digit_zero)));
    } else if (cp == kDanda || cp == kDoubleDanda) {
      out.push_back('.');
    } else {
      if (stats && table.in_block(cp)) ++stats->unknown;
      out.append(text.substr(pos, len));
    }
    pos += len;
  }
  return out;
}

bool detect_indic_script(std::string_view text, Language& lang) {
  for (std::size_t pos = 0, len = 0; pos < text.size(); pos += len) {
    const char32_t cp = utf8::decode(text, pos, len);
    if (cp >= 0x0980 && cp <= 0x09FF) {
      lang = Language::Bengali;
      return true;
    }
    if (cp >= 0x0900 && cp <= 0x097F) {
      lang = Language::Hindi;
      return true;
    }
  }
  return false;
}

std::string romanize(std::string_view text) {
  std::string out(text);
  Language lang{};
  // Mixed-script lines are handled one script at a time.
  for (int pass = 0; pass < 2 && detect_indic_script(out, lang); ++pass) {
    out = transliterate(out, TransliterationTable::bundled(lang));
  }
  return out;
}

}  // namespace trimix
