#include "trimix/codemix/mixer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "trimix/error.hpp"
#include "trimix/text/utf8.hpp"
#include "trimix/translit/translit.hpp"

namespace trimix {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string capitalize_like(std::string romanized, std::string_view original) {
  if (!original.empty() && original[0] >= 'A' && original[0] <= 'Z' && !romanized.empty() && romanized[0] >= 'a' &&
      romanized[0] <= 'z') {
    romanized[0] = static_cast<char>(romanized[0] - 'a' + 'A');
  }
  return romanized;
}

bool valid_utf8(std::string_view s) {
  for (std::size_t pos = 0, len = 0; pos < s.size(); pos += len) {
    if (utf8::decode(s, pos, len) == utf8::kInvalid) return false;
  }
  return true;
}

}  // namespace

std::string_view token_language_code(TokenLanguage lang) {
  switch (lang) {
    case TokenLanguage::En: return "en";
    case TokenLanguage::Bn: return "bn";
    case TokenLanguage::Hi: return "hi";
  }
  return "en";
}

std::vector<WordToken> word_tokenize(std::string_view text) {
  std::vector<WordToken> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto ws_start = pos;
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos == text.size()) break;
    std::string space(text.substr(ws_start, pos - ws_start));
    auto end = pos;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::string_view chunk = text.substr(pos, end - pos);

    std::size_t lead = 0;
    while (lead < chunk.size() && is_punct(chunk[lead])) ++lead;
    std::size_t trail = chunk.size();
    while (trail > lead && is_punct(chunk[trail - 1])) --trail;

    for (std::size_t i = 0; i < lead; ++i) {
      tokens.push_back({std::string(1, chunk[i]), TokenKind::Punctuation, i == 0 ? space : std::string()});
    }
    if (trail > lead) {
      tokens.push_back({std::string(chunk.substr(lead, trail - lead)), TokenKind::Word, lead == 0 ? space : std::string()});
    }
    for (std::size_t i = std::max(trail, lead); i < chunk.size(); ++i) {
      tokens.push_back({std::string(1, chunk[i]), TokenKind::Punctuation, std::string()});
    }
    pos = end;
  }
  return tokens;
}

void MixConfig::validate() const {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("mix ratio must lie in [0, 1]");
  if (!std::isfinite(bengali_weight) || !std::isfinite(hindi_weight) || bengali_weight < 0.0 || hindi_weight < 0.0) {
    throw ConfigError("language weights must be finite and non-negative");
  }
  if (bengali_weight + hindi_weight <= 0.0) throw ConfigError("language weights must not both be zero");
}

std::string render(const std::vector<MixedToken>& tokens, std::string_view trailing_space) {
  std::string out;
  for (const auto& t : tokens) {
    out += t.space_before;
    out += t.surface;
  }
  out += trailing_space;
  return out;
}

MixedSentence mix_sentence(std::string_view sentence, const Lexicon& lexicon, const MixConfig& cfg, Rng& stream) {
  cfg.validate();
  MixedSentence out;
  const double total_weight = cfg.bengali_weight + cfg.hindi_weight;
  for (auto& tok : word_tokenize(sentence)) {
    MixedToken mixed{std::move(tok.surface), TokenLanguage::En, false, std::move(tok.space_before), tok.kind};
    if (tok.kind == TokenKind::Word) {
      if (const Translation* tr = lexicon.find(utf8::ascii_lower(mixed.surface))) {
        ++out.substitutable;
        if (stream.uniform() < cfg.ratio) {
          const bool bengali = stream.uniform() * total_weight < cfg.bengali_weight;
          const Language lang = bengali ? Language::Bengali : Language::Hindi;
          const auto romanized =
              transliterate(bengali ? tr->bengali : tr->hindi, TransliterationTable::bundled(lang));
          mixed.surface = capitalize_like(romanized, mixed.surface);
          mixed.language = bengali ? TokenLanguage::Bn : TokenLanguage::Hi;
          mixed.substituted = true;
        }
      }
    }
    out.tokens.push_back(std::move(mixed));
  }
  auto tail = sentence.size();
  while (tail > 0 && is_space(sentence[tail - 1])) --tail;
  out.trailing_space = std::string(sentence.substr(tail));
  if (out.tokens.empty()) out.trailing_space = std::string(sentence);
  out.text = render(out.tokens, out.trailing_space);
  return out;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& other) {
  sentences += other.sentences;
  word_tokens += other.word_tokens;
  substitutable += other.substitutable;
  substituted += other.substituted;
  english += other.english;
  bengali += other.bengali;
  hindi += other.hindi;
  return *this;
}

void CorpusStats::add(const MixedSentence& sentence) {
  ++sentences;
  substitutable += sentence.substitutable;
  for (const auto& t : sentence.tokens) {
    if (t.kind == TokenKind::Punctuation) continue;
    ++word_tokens;
    if (t.substituted) ++substituted;
    switch (t.language) {
      case TokenLanguage::En: ++english; break;
      case TokenLanguage::Bn: ++bengali; break;
      case TokenLanguage::Hi: ++hindi; break;
    }
  }
}

MixedCorpus mix_corpus(const std::vector<std::string>& lines, const Lexicon& lexicon, const MixConfig& cfg,
                       unsigned threads) {
  cfg.validate();
  MixedCorpus corpus;
  corpus.sentences.resize(lines.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(lines.size(), 1))));
  auto work = [&](std::size_t first, std::size_t stride, CorpusStats& stats) {
    for (std::size_t i = first; i < lines.size(); i += stride) {
      Rng stream = Rng::stream(cfg.seed, i);
      corpus.sentences[i] = mix_sentence(lines[i], lexicon, cfg, stream);
      stats.add(corpus.sentences[i]);
    }
  };
  std::vector<CorpusStats> partial(threads);
  if (threads == 1) {
    work(0, 1, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads, std::ref(partial[t]));
    for (auto& th : pool) th.join();
  }
  for (const auto& p : partial) corpus.stats += p;
  return corpus;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!valid_utf8(line)) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": invalid UTF-8");
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw FormatError(path.string() + ":" + std::to_string(line_no + 1) + ": read failure");
  return lines;
}

std::string to_jsonl(const MixedSentence& sentence) {
  nlohmann::ordered_json rec;
  rec["text"] = sentence.text;
  auto tokens = nlohmann::ordered_json::array();
  for (const auto& t : sentence.tokens) {
    nlohmann::ordered_json tok;
    tok["surface"] = t.surface;
    tok["lang"] = token_language_code(t.language);
    tok["substituted"] = t.substituted;
    tokens.push_back(std::move(tok));
  }
  rec["tokens"] = std::move(tokens);
  return rec.dump();
}

std::string stats_json(const CorpusStats& stats, const MixConfig& cfg) {
  nlohmann::ordered_json j;
  j["sentences"] = stats.sentences;
  j["word_tokens"] = stats.word_tokens;
  j["substitutable"] = stats.substitutable;
  j["substituted"] = stats.substituted;
  j["substituted_fraction"] = stats.substituted_fraction();
  j["languages"] = {{"en", stats.english}, {"bn", stats.bengali}, {"hi", stats.hindi}};
  j["config"] = {{"ratio", cfg.ratio}, {"bengali_weight", cfg.bengali_weight}, {"hindi_weight", cfg.hindi_weight},
                 {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

}  // namespace trimix
