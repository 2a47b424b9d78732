#include "trimix/tokenizer/wordpiece.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "trimix/error.hpp"
#include "trimix/text/utf8.hpp"

namespace trimix {

namespace {

const std::vector<std::string> kSpecialTokens{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
constexpr std::string_view kContinuation = "##";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    auto end = pos;
    while (end < text.size() && !is_space(text[end])) ++end;
    if (end > pos) words.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return words;
}

std::vector<std::string> code_points(std::string_view word) {
  std::vector<std::string> out;
  for (std::size_t pos = 0, len = 0; pos < word.size(); pos += len) {
    utf8::decode(word, pos, len);
    out.emplace_back(word.substr(pos, len));
  }
  return out;
}

bool is_continuation(std::string_view t) { return t.starts_with(kContinuation); }

std::string_view strip_continuation(std::string_view t) {
  return is_continuation(t) ? t.substr(kContinuation.size()) : t;
}

}  // namespace

Vocab::Vocab() : tokens_(kSpecialTokens) { index(); }

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kSpecialTokens.size() ||
      !std::equal(kSpecialTokens.begin(), kSpecialTokens.end(), tokens_.begin())) {
    throw FormatError("vocabulary must start with [PAD] [UNK] [CLS] [SEP] [MASK]");
  }
  index();
}

void Vocab::index() {
  id_of_.clear();
  max_piece_ = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty() || std::any_of(t.begin(), t.end(), is_space)) {
      throw FormatError("vocabulary token " + std::to_string(i) + " is empty or contains whitespace");
    }
    if (!id_of_.emplace(t, static_cast<int>(i)).second) throw FormatError("duplicate vocabulary token '" + t + "'");
    if (i >= kSpecialTokens.size()) max_piece_ = std::max(max_piece_, utf8::count_code_points(strip_continuation(t)));
  }
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw FormatError("token id " + std::to_string(id) + " outside vocabulary of " + std::to_string(tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

int Vocab::id(std::string_view token) const {
  const auto it = id_of_.find(std::string(token));
  return it == id_of_.end() ? -1 : it->second;
}

std::string Vocab::serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocab Vocab::parse(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(std::move(line));
    pos = nl + 1;
  }
  return Vocab(std::move(tokens));
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open vocabulary " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write vocabulary " + path.string());
  out << serialize();
  if (!out) throw FormatError("failed writing vocabulary " + path.string());
}

std::string Vocab::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Vocab train_wordpiece(std::span<const std::string> corpus, const WordPieceTrainerConfig& cfg) {
  if (corpus.empty()) throw ConfigError("tokenizer training corpus is empty");
  if (cfg.min_frequency < 1) throw ConfigError("min_frequency must be at least 1");

  std::map<std::string, std::size_t> word_freq;
  for (const auto& line : corpus) {
    const auto lower = utf8::ascii_lower(line);
    for (auto w : split_words(lower)) ++word_freq[std::string(w)];
  }
  if (word_freq.empty()) throw ConfigError("tokenizer training corpus has no words");

  // Symbol table shared by words and pairs.
  std::vector<std::string> symbols;
  std::unordered_map<std::string, int> symbol_id;
  auto intern = [&](const std::string& s) {
    auto [it, fresh] = symbol_id.emplace(s, static_cast<int>(symbols.size()));
    if (fresh) symbols.push_back(s);
    return it->second;
  };

  std::set<std::string> alphabet;
  std::vector<std::vector<int>> words;
  std::vector<std::size_t> freqs;
  for (const auto& [w, f] : word_freq) {
    const auto cps = code_points(w);
    std::vector<int> syms;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      alphabet.insert(cps[i]);
      alphabet.insert(std::string(kContinuation) + cps[i]);
      syms.push_back(intern(i == 0 ? cps[i] : std::string(kContinuation) + cps[i]));
    }
    words.push_back(std::move(syms));
    freqs.push_back(f);
  }

  if (cfg.vocab_size < alphabet.size() + kSpecialTokens.size()) {
    throw ConfigError("vocab_size " + std::to_string(cfg.vocab_size) + " is smaller than the alphabet (" +
                      std::to_string(alphabet.size()) + ") plus 5 specials");
  }
  std::vector<std::string> vocab(kSpecialTokens);
  vocab.insert(vocab.end(), alphabet.begin(), alphabet.end());
  std::unordered_set<std::string> in_vocab(vocab.begin(), vocab.end());

  using Pair = std::pair<int, int>;
  std::map<Pair, std::size_t> counts;
  std::map<Pair, std::set<std::size_t>> where;
  auto by_rank = [&](const Pair& a, const Pair& b) {
    const auto ca = counts.at(a);
    const auto cb = counts.at(b);
    if (ca != cb) return ca > cb;
    const auto& al = symbols[static_cast<std::size_t>(a.first)];
    const auto& bl = symbols[static_cast<std::size_t>(b.first)];
    if (al != bl) return al < bl;
    return symbols[static_cast<std::size_t>(a.second)] < symbols[static_cast<std::size_t>(b.second)];
  };
  std::set<Pair, decltype(by_rank)> ranked(by_rank);

  auto bump = [&](const Pair& p, std::size_t word, long delta) {
    if (counts.contains(p)) ranked.erase(p);
    auto& c = counts[p];
    c = static_cast<std::size_t>(static_cast<long>(c) + delta);
    if (c == 0) {
      counts.erase(p);
    } else {
      ranked.insert(p);
    }
    if (delta > 0) where[p].insert(word);
  };
  auto add_pairs = [&](std::size_t w, long sign) {
    const auto& s = words[w];
    for (std::size_t i = 0; i + 1 < s.size(); ++i) bump({s[i], s[i + 1]}, w, sign * static_cast<long>(freqs[w]));
  };
  for (std::size_t w = 0; w < words.size(); ++w) add_pairs(w, +1);

  while (vocab.size() < cfg.vocab_size && !ranked.empty()) {
    const Pair best = *ranked.begin();
    if (counts.at(best) < cfg.min_frequency) break;
    const auto& left = symbols[static_cast<std::size_t>(best.first)];
    const auto& right = symbols[static_cast<std::size_t>(best.second)];
    const std::string merged = left + std::string(strip_continuation(right));
    const int merged_id = intern(merged);
    if (in_vocab.insert(merged).second) vocab.push_back(merged);

    const auto touched = where[best];
    for (auto w : touched) {
      auto& s = words[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < s.size() && !present; ++i) present = s[i] == best.first && s[i + 1] == best.second;
      if (!present) continue;
      add_pairs(w, -1);
      std::vector<int> next;
      for (std::size_t i = 0; i < s.size();) {
        if (i + 1 < s.size() && s[i] == best.first && s[i + 1] == best.second) {
          next.push_back(merged_id);
          i += 2;
        } else {
          next.push_back(s[i]);
          ++i;
        }
      }
      s = std::move(next);
      add_pairs(w, +1);
    }
    where.erase(best);
  }
  return Vocab(std::move(vocab));
}

std::size_t Encoding::length() const {
  return static_cast<std::size_t>(std::count(attention.begin(), attention.end(), static_cast<unsigned char>(1)));
}

std::vector<int> encode_word(std::string_view lower_word, const Vocab& vocab) {
  const auto cps = code_points(lower_word);
  std::vector<int> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    int found = -1;
    std::size_t found_end = start;
    const auto limit = std::min(cps.size(), start + std::max<std::size_t>(vocab.max_piece_length(), 1));
    std::string candidate = start == 0 ? std::string() : std::string(kContinuation);
    for (std::size_t end = start; end < limit; ++end) {
      candidate += cps[end];
      const int id = vocab.id(candidate);
      if (id >= special::kCount) {
        found = id;
        found_end = end + 1;
      }
    }
    if (found < 0) return {special::kUnk};
    pieces.push_back(found);
    start = found_end;
  }
  return pieces;
}

Encoding encode(std::string_view text, const Vocab& vocab, std::size_t max_len) {
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
  std::vector<int> pieces;
  const auto lower = utf8::ascii_lower(text);
  for (auto w : split_words(lower)) {
    const auto p = encode_word(w, vocab);
    pieces.insert(pieces.end(), p.begin(), p.end());
    if (pieces.size() >= max_len - 2) break;
  }
  if (pieces.size() > max_len - 2) pieces.resize(max_len - 2);
  Encoding enc;
  enc.ids.reserve(max_len);
  enc.ids.push_back(special::kCls);
  enc.ids.insert(enc.ids.end(), pieces.begin(), pieces.end());
  enc.ids.push_back(special::kSep);
  enc.attention.assign(enc.ids.size(), 1);
  enc.ids.resize(max_len, special::kPad);
  enc.attention.resize(max_len, 0);
  return enc;
}

std::string decode(std::span<const int> ids, const Vocab& vocab) {
  std::string out;
  for (int id : ids) {
    const auto& tok = vocab.token(id);
    if (Vocab::is_special(id)) continue;
    if (is_continuation(tok) && !out.empty()) {
      out += strip_continuation(tok);
    } else {
      if (!out.empty()) out += ' ';
      out += strip_continuation(tok);
    }
  }
  return out;
}

}  // namespace trimix
