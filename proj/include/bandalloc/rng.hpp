#pragma once

#include <cstdint>
#include <random>

namespace bandalloc {

// Seeded pseudorandom stream. Every call to uniform() or bernoulli() consumes
// exactly one 64-bit engine output, so draw counts are part of the contract.
// std::seed_seq and std::mt19937_64 are fully specified by the standard, and
// the double conversion is done here, so streams are portable across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint32_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      stream};
    engine_.seed(seq);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bandalloc
