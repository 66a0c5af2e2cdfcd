#pragma once

#include <cstdint>
#include <random>

namespace dlv {

// Deterministic across standard libraries: mt19937_64 has a fixed output
// sequence, and the real conversion below avoids implementation-defined
// distribution objects.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform magnitude in [lo, hi] with a random sign.
  double signed_uniform(double lo, double hi) {
    const double m = uniform(lo, hi);
    return (engine_() & 1U) != 0U ? m : -m;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dlv
