#pragma once

#include <cstdint>

namespace qecw {

// Stateless counter-based random stream. Every draw is a pure function of
// (seed, shot, site, draw), so sampling is reproducible independent of
// execution order and thread count.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t bits(uint64_t shot, uint64_t site, uint64_t draw) const {
    uint64_t x = seed_;
    x = mix(x ^ (0x9e3779b97f4a7c15ULL + shot));
    x = mix(x ^ (0xbf58476d1ce4e5b9ULL + site));
    x = mix(x ^ (0x94d049bb133111ebULL + draw));
    return mix(x);
  }

  // Uniform in [0, 1).
  double uniform(uint64_t shot, uint64_t site, uint64_t draw) const {
    return (bits(shot, site, draw) >> 11) * 0x1.0p-53;
  }

  bool coin(uint64_t shot, uint64_t site, uint64_t draw) const {
    return bits(shot, site, draw) >> 63;
  }

  uint64_t seed() const { return seed_; }

 private:
  // splitmix64 finalizer
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
};

}  // namespace qecw
