#pragma once

#include <cstddef>
#include <vector>

#include "trimix/numeric/rng.hpp"
#include "trimix/tokenizer/wordpiece.hpp"

namespace trimix {

struct MaskingConfig {
  double mlm_probability = 0.15;
  double mask_fraction = 0.8;
  double random_fraction = 0.1;
  double keep_fraction = 0.1;

  void validate() const;
};

struct MaskedSequence {
  std::vector<int> ids;
  /// Original id at selected positions, kIgnoreLabel elsewhere.
  std::vector<int> labels;
  std::size_t candidates = 0;
  std::size_t masked = 0;
  std::size_t randomized = 0;
  std::size_t kept = 0;

  std::size_t selected() const { return masked + randomized + kept; }
};

/// Positions holding a non-special id are candidates. Each is selected with
/// probability mlm_probability (one uniform draw per candidate); a selected
/// position takes a second uniform draw that picks [MASK], a uniformly
/// random non-special id (one more bounded draw), or the original id.
MaskedSequence apply_mlm_masking(const Encoding& enc, const Vocab& vocab, const MaskingConfig& cfg, Rng& rng);

}  // namespace trimix
