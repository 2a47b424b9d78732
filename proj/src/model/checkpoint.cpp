#include "trimix/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trimix/error.hpp"

namespace trimix {

namespace {

constexpr std::string_view kMagic = "MDBT1";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

nlohmann::ordered_json config_json(const EncoderConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"max_len", c.max_len},         {"hidden", c.hidden},
          {"layers", c.layers},         {"heads", c.heads},             {"ff_dim", c.ff_dim},
          {"dropout", c.dropout},       {"label_count", c.label_count}, {"tie_mlm_output", c.tie_mlm_output}};
}

EncoderConfig config_from(const nlohmann::json& j) {
  EncoderConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.ff_dim = j.at("ff_dim").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.label_count = j.at("label_count").get<std::size_t>();
  c.tie_mlm_output = j.at("tie_mlm_output").get<bool>();
  return c;
}

}  // namespace

std::string checkpoint_bytes(const ModelParams& params, const std::string& vocab_hash,
                             const std::vector<std::string>& labels) {
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  for (const auto& e : params.entries()) manifest.push_back({{"name", e.name}, {"shape", e.tensor.shape()}});
  nlohmann::ordered_json header{{"config", config_json(params.config())},
                                {"vocab_hash", vocab_hash},
                                {"labels", labels},
                                {"parameters", manifest}};
  const std::string text = header.dump();

  std::string out(kMagic);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + 8 * params.scalar_count());
  for (const auto& e : params.entries()) {
    for (double x : e.tensor.data()) put_u64(out, std::bit_cast<std::uint64_t>(x));
  }
  return out;
}

void save_checkpoint(const ModelParams& params, const std::string& vocab_hash, const std::filesystem::path& path,
                     const std::vector<std::string>& labels) {
  const std::string bytes = checkpoint_bytes(params, vocab_hash, labels);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing checkpoint " + path.string());
}

Checkpoint parse_checkpoint(const std::string& bytes, const std::string& source) {
  if (bytes.size() < kMagic.size() || std::string_view(bytes).substr(0, kMagic.size()) != kMagic) {
    throw FormatError(source + ": not a checkpoint (bad magic)");
  }
  std::size_t pos = kMagic.size();
  if (bytes.size() < pos + 8) throw FormatError(source + ": truncated header length");
  const std::uint64_t header_len = get_u64(bytes.data() + pos);
  pos += 8;
  if (header_len > bytes.size() - pos) throw FormatError(source + ": truncated header");

  Checkpoint ck;
  std::vector<std::pair<std::string, Shape>> manifest;
  try {
    const auto header = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                              bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
    ck.params = ModelParams::zeros(config_from(header.at("config")));
    ck.vocab_hash = header.at("vocab_hash").get<std::string>();
    ck.labels = header.at("labels").get<std::vector<std::string>>();
    for (const auto& p : header.at("parameters")) {
      manifest.emplace_back(p.at("name").get<std::string>(), p.at("shape").get<Shape>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source + ": malformed header: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(source + ": invalid model config: " + e.what());
  }
  pos += header_len;

  auto& entries = ck.params.entries();
  if (manifest.size() != entries.size()) {
    throw FormatError(source + ": manifest lists " + std::to_string(manifest.size()) + " tensors, config implies " +
                      std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (manifest[i].first != entries[i].name || manifest[i].second != entries[i].tensor.shape()) {
      throw FormatError(source + ": manifest entry " + std::to_string(i) + " (" + manifest[i].first + " " +
                        shape_string(manifest[i].second) + ") does not match the config");
    }
  }
  const std::size_t need = 8 * ck.params.scalar_count();
  if (bytes.size() - pos < need) {
    throw FormatError(source + ": truncated payload (" + std::to_string(bytes.size() - pos) + " of " +
                      std::to_string(need) + " bytes)");
  }
  if (bytes.size() - pos > need) throw FormatError(source + ": trailing bytes after payload");
  for (auto& e : entries) {
    for (double& x : e.tensor.data()) {
      x = std::bit_cast<double>(get_u64(bytes.data() + pos));
      pos += 8;
    }
  }
  if (ck.params.config().label_count > 0 && !ck.labels.empty() &&
      ck.labels.size() != ck.params.config().label_count) {
    throw FormatError(source + ": label list does not match label_count");
  }
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str(), path.string());
}

}  // namespace trimix
