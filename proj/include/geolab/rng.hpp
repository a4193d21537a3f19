#pragma once
#include <cstdint>
#include <random>

namespace geolab {

// Seeded RNG with hand-rolled uniform doubles. std::uniform_real_distribution
// is implementation-defined, which would break the byte-identical-output
// contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace geolab
