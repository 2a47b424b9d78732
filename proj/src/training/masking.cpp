#include "trimix/training/masking.hpp"

#include <cmath>

#include "trimix/error.hpp"
#include "trimix/numeric/ops.hpp"

namespace trimix {

void MaskingConfig::validate() const {
  if (!(mlm_probability >= 0.0 && mlm_probability <= 1.0)) throw ConfigError("mlm_probability must lie in [0, 1]");
  for (double f : {mask_fraction, random_fraction, keep_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("masking action fractions must lie in [0, 1]");
  }
  if (std::abs(mask_fraction + random_fraction + keep_fraction - 1.0) > 1e-9) {
    throw ConfigError("mask, random and keep fractions must sum to 1");
  }
}

MaskedSequence apply_mlm_masking(const Encoding& enc, const Vocab& vocab, const MaskingConfig& cfg, Rng& rng) {
  MaskedSequence out;
  out.ids = enc.ids;
  out.labels.assign(enc.ids.size(), kIgnoreLabel);
  const auto ordinary = static_cast<std::uint64_t>(vocab.size() - special::kCount);
  for (std::size_t i = 0; i < enc.ids.size(); ++i) {
    const int id = enc.ids[i];
    if (Vocab::is_special(id) || enc.attention[i] == 0) continue;
    ++out.candidates;
    if (rng.uniform() >= cfg.mlm_probability) continue;
    out.labels[i] = id;
    const double action = rng.uniform();
    if (action < cfg.mask_fraction) {
      out.ids[i] = special::kMask;
      ++out.masked;
    } else if (action < cfg.mask_fraction + cfg.random_fraction && ordinary > 0) {
      out.ids[i] = special::kCount + static_cast<int>(rng.below(ordinary));
      ++out.randomized;
    } else {
      ++out.kept;
    }
  }
  return out;
}

}  // namespace trimix
