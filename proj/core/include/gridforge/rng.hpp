#ifndef GRIDFORGE_RNG_HPP
#define GRIDFORGE_RNG_HPP

#include <cstdint>

namespace gridforge {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used both as a stateful
// stream and as a counter-based hash so that draws indexed by
// (seed, scenario, edge) are reproducible independent of evaluation order.
inline constexpr uint64_t splitmix64_mix(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double to_unit_interval(uint64_t x) {
  return double(x >> 11) * 0x1.0p-53;
}

// Counter-based uniform draw keyed on up to two stream indices.
inline constexpr double uniform_at(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t h = splitmix64_mix(seed);
  h = splitmix64_mix(h ^ (a + 0x9E3779B97F4A7C15ull));
  h = splitmix64_mix(h ^ (b + 0xD1B54A32D192ED03ull));
  return to_unit_interval(h);
}

// Sequential splitmix64 stream.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  constexpr uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  constexpr double next_unit() { return to_unit_interval(next_u64()); }

  // Uniform in [lo, hi).
  constexpr double next_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform integer in [0, n); n must be positive. Modulo bias is irrelevant
  // at the magnitudes used here.
  constexpr uint64_t next_below(uint64_t n) { return next_u64() % n; }

  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      auto j = static_cast<decltype(i)>(next_below(uint64_t(i) + 1));
      using std::swap;
      swap(first[i], first[j]);
    }
  }

 private:
  uint64_t state_;
};

inline constexpr const char* kRngAlgorithmName = "splitmix64";

}  // namespace gridforge

#endif
