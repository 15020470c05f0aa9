#pragma once

#include <cstdint>

namespace margame {

/// Counter-based generator: every draw is SplitMix64 applied to a key mixed
/// from (seed, step, stream), so any draw can be reproduced in isolation and
/// streams never interfere.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t step, std::uint64_t stream) const noexcept {
    return mix(mix(mix(seed_) ^ step) ^ (stream * 0xD1B54A32D192ED03ULL));
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t step, std::uint64_t stream) const noexcept {
    return static_cast<double>(bits(step, stream) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace margame
