#pragma once

#include <array>
#include <cstdint>

namespace trimix {

/// One splitmix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** generator whose 256-bit state is filled by four successive
/// splitmix64 outputs of the 64-bit seed.
///
/// Every derived quantity (uniform doubles, bounded integers, normals) is
/// computed from `next_u64` with fixed arithmetic so a seed reproduces the
/// same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Stream for item `index` of a seeded job: Rng(splitmix64(seed ^ index)).
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound), unbiased (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();

  template <typename It>
  void shuffle(It first, It last) {
    // Fisher-Yates from the back.
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Seed for a named purpose (masking, dropout, shuffling) derived from a run seed.
std::uint64_t purpose_seed(std::uint64_t seed, std::uint64_t purpose);

}  // namespace trimix
