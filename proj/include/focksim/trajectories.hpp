#pragma once

// Sequential photodetection behind a 50/50 splitter: two equal Fock sources
// |n>|n> develop a definite relative phase purely through the measurement
// record. Jump operators are the output-port annihilators under the library's
// splitter convention, c = (a - b)/sqrt(2) and d = (a + b)/sqrt(2); each click
// removes one photon, and the conditioned state stays inside a single total
// photon-number sector.
//
// The relative-phase posterior after each click is the conditioned state's
// overlap with the relative-phase eigenstates of the *remaining* photons,
//   |theta; M> = (M+1)^(-1/2) sum_m e^{i m theta} |m, M-m>,
// evaluated on a uniform grid (default 256 points). Note the resolution of
// this posterior is set by the remaining sector size M: as detections consume
// photons, the narrowest representable peak widens, so late in a long record
// the mean entropy can drift back up even though the record keeps localizing
// the phase. The aggregate statistics expose exactly that behavior.

#include <cstdint>
#include <vector>

#include "focksim/fock.hpp"
#include "focksim/rng.hpp"

namespace focksim {

enum class Port { c, d };

struct DetectionResult {
  Port outcome;
  double p_c;             // probability of the c outcome before the draw
  FockVector post_state;  // normalized conditioned state
};

struct DetectionResultMixed {
  Port outcome;
  double p_c;
  DensityMatrix post_state;
};

// One detection on a two-mode state (modes 0, 1). Outcome probabilities are
// <c^dag c>/<N> and <d^dag d>/<N>; the post state is the normalized image
// under the matching jump operator. Throws on (numerically) vacuum input.
DetectionResult detect_one(const FockVector& psi, Rng& rng);
DetectionResultMixed detect_one(const DensityMatrix& rho, Rng& rng);

struct PhasePosterior {
  std::vector<double> grid;     // theta_j in [0, 2pi)
  std::vector<double> weights;  // sums to 1

  double entropy() const;              // -sum w ln w, in nats
  double peak() const;                 // grid point of the largest weight
  double sample(Rng& rng) const;       // theta ~ posterior, dithered in-cell
};

// Posterior over relative phase for a state supported on one total-number
// sector (throws if more than kDerivedTol of the mass lies outside the
// dominant sector). A photonless state gives the uniform posterior.
PhasePosterior phase_posterior(const FockVector& psi, int grid_points = 256);

// Fringe contrast of the two-mode state: the port-d detection rate
// I(phi) = <d^dag d> is swept over an applied test phase on mode 0 and the
// contrast (I_max - I_min)/(I_max + I_min) is extracted. The swept rate is a
// pure first harmonic in phi, so the extrema are recovered from the first
// discrete Fourier coefficient of the sampled sweep (a grid argmax alone
// would be off by O(1/grid^2), far above the tolerances in use).
// Throws on zero-intensity states.
double visibility(const FockVector& psi, int grid_points = 256);
double visibility(const DensityMatrix& rho, int grid_points = 256);

struct TrajectoryStep {
  Port outcome;
  double p_c;
  double visibility;
  double entropy;
  double peak;
};

struct LocalizationRun {
  std::uint64_t seed = 0;
  int n = 0;
  int grid_points = 0;
  double initial_entropy = 0.0;  // uniform posterior: ln(grid_points)
  std::vector<TrajectoryStep> steps;
  FockVector final_state;
  double posterior_sample = 0.0;  // one draw from the final posterior
};

// Full trajectory from |n>|n>: k detections (k <= 2n-1 so fringes stay
// definable), per-step posterior statistics, deterministic per seed.
LocalizationRun run_localization(int n, int k, std::uint64_t seed, int grid_points = 256);

}  // namespace focksim
