#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trimix/model/encoder.hpp"

namespace trimix {

struct Checkpoint {
  ModelParams params;
  std::string vocab_hash;
  /// Class names for a fine-tuned model, in label-id order.
  std::vector<std::string> labels;
};

/// Binary layout: "MDBT1", u64 little-endian header length, JSON header
/// (config, manifest of names and shapes, vocab hash, labels), then every
/// tensor as little-endian float64 in manifest order.
void save_checkpoint(const ModelParams& params, const std::string& vocab_hash, const std::filesystem::path& path,
                     const std::vector<std::string>& labels = {});

/// Throws FormatError on a bad magic, malformed header or truncated payload.
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string checkpoint_bytes(const ModelParams& params, const std::string& vocab_hash,
                             const std::vector<std::string>& labels = {});
Checkpoint parse_checkpoint(const std::string& bytes, const std::string& source = "checkpoint");

}  // namespace trimix
