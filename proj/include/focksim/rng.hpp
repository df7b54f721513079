#pragma once

// Deterministic random numbers. std::uniform_real_distribution and friends are
// implementation-defined, which would break the byte-identical-output contract
// across toolchains, so all variates are derived from the raw mt19937_64 stream
// with fixed arithmetic.

#include <cstdint>
#include <random>

#include "focksim/fock.hpp"

namespace focksim {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform on {0, ..., n-1}; bias O(n * 2^-53) is irrelevant at these scales.
  int uniform_int(int n) {
    int v = static_cast<int>(uniform01() * n);
    return v >= n ? n - 1 : v;
  }

 private:
  std::mt19937_64 engine_;
};

inline complexd random_complex(Rng& rng, double radius = 1.0) {
  return {rng.uniform(-radius, radius), rng.uniform(-radius, radius)};
}

// Haar-ish random pure state (Gaussian-free: components uniform in the square,
// then normalized — adequate for property tests, deterministic by construction).
FockVector random_pure(BasisPtr basis, Rng& rng);

// Random mixed state as a convex mixture of `terms` random pure states.
DensityMatrix random_density(BasisPtr basis, Rng& rng, int terms = 3);

}  // namespace focksim
