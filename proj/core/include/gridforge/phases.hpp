#ifndef GRIDFORGE_PHASES_HPP
#define GRIDFORGE_PHASES_HPP

#include <array>
#include <cstdint>
#include <string>

namespace gridforge {

// Distribution circuits carry up to three phases A/B/C. Single-phase studies
// use the set {A}.
enum class Phase : int { A = 0, B = 1, C = 2 };

inline constexpr int kNumPhases = 3;
inline constexpr std::array<Phase, 3> kAllPhases{Phase::A, Phase::B, Phase::C};

inline char phase_char(Phase p) { return static_cast<char>('A' + static_cast<int>(p)); }

// Value type over a 3-bit mask.
class PhaseSet {
 public:
  constexpr PhaseSet() = default;
  static constexpr PhaseSet all() { return PhaseSet(0b111); }
  static constexpr PhaseSet single(Phase p) { return PhaseSet(uint8_t(1u << static_cast<int>(p))); }

  constexpr bool contains(Phase p) const { return (bits_ >> static_cast<int>(p)) & 1u; }
  constexpr void add(Phase p) { bits_ |= uint8_t(1u << static_cast<int>(p)); }
  constexpr int size() const {
    return int(bits_ & 1u) + int((bits_ >> 1) & 1u) + int((bits_ >> 2) & 1u);
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool subset_of(PhaseSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr PhaseSet intersect(PhaseSet other) const { return PhaseSet(uint8_t(bits_ & other.bits_)); }

  std::string to_string() const {
    std::string s;
    for (Phase p : kAllPhases)
      if (contains(p)) s.push_back(phase_char(p));
    return s;
  }

  friend constexpr bool operator==(PhaseSet a, PhaseSet b) { return a.bits_ == b.bits_; }

 private:
  explicit constexpr PhaseSet(uint8_t bits) : bits_(bits) {}
  uint8_t bits_ = 0;
};

// Dense per-phase storage; slots for absent phases stay at zero.
using PerPhase = std::array<double, 3>;

inline constexpr PerPhase zero_phases() { return {0.0, 0.0, 0.0}; }

inline double phase_sum(const PerPhase& v) { return v[0] + v[1] + v[2]; }

}  // namespace gridforge

#endif
