#pragma once

// Seeded random source for measurement sampling.
//
// Reproducibility contract: mt19937_64 has a fixed algorithm across standard
// library implementations, and the uniform double is derived from the raw
// 64-bit output as (x >> 11) * 2^-53 rather than through
// std::uniform_real_distribution (whose mapping is implementation-defined).
// Identical seeds therefore give identical draw sequences everywhere.

#include <cstdint>
#include <random>

namespace qduet {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qduet
