#pragma once

#include <cstdint>
#include <vector>

namespace patchfuse {

// Seeded splitmix64 generator. Used instead of <random> engines plus
// std::uniform_int_distribution because the latter is implementation-defined;
// runs must be bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Unbiased uniform integer in [0, bound); bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1).
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    return lo + int(next_below(std::uint64_t(hi - lo) + 1));
  }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Independent stream derived from the original seed, not from consumption
  // state, so forked streams do not depend on draw order.
  Rng child(std::uint64_t stream) const {
    Rng mixer(seed_ ^ (0xD1B54A32D192ED03ull * (stream + 1)));
    return Rng(mixer.next_u64());
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = std::size_t(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace patchfuse
