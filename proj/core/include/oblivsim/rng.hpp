#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace oblivsim {

// splitmix64 finalizer; derives independent stream seeds from (base, lane).
inline uint64_t mix_seed(uint64_t base, uint64_t lane) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (lane + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic randomness source. Only raw mt19937_64 words are consumed
// (the engine sequence is pinned by the standard), never distribution
// adaptors, so a seed reproduces the same draws on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t word() { return engine_(); }

  // n high-quality bits, n <= 64.
  uint64_t bits(unsigned n) {
    if (n > 64) throw std::invalid_argument("Rng::bits: n > 64");
    if (n == 0) return 0;
    return engine_() >> (64u - n);
  }

  bool bit() { return bits(1) != 0; }

  // Uniform in [0, bound) by masked rejection.
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound is 0");
    if (bound == 1) return 0;
    uint64_t mask = ~uint64_t{0} >> __builtin_clzll(bound - 1);
    for (;;) {
      uint64_t v = engine_() & mask;
      if (v < bound) return v;
    }
  }

  // Uniform double in [0, 1), 53 bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oblivsim
