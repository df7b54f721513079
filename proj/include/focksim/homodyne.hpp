#pragma once

// Two descriptions of balanced homodyne detection of a coherent signal.
//
// The "factist" description keeps the local oscillator classical: the measured
// intensity difference is the single-mode operator beta* a + beta a^dag, and a
// phase shifter moves the plate's worth of phase into the observable. The
// "fictionist" description internalizes the oscillator as a second mode whose
// preparation carries no external phase reference: the joint state is the
// collectively dephased |alpha>|beta>, and the intensity difference is the
// relative-number operator a^dag b + b^dag a. The two must agree on first
// moments exactly and on higher moments up to corrections that vanish as the
// oscillator amplitude grows — which is what the comparison helpers quantify.
//
// Phase-shift convention: the applied plate shifts the *signal* mode by -phi
// (the signal becomes |alpha e^{-i phi}>), giving the factist mean
// beta* e^{-i phi} alpha + beta e^{i phi} alpha*.

#include "focksim/fock.hpp"

namespace focksim {

struct HomodyneSetup {
  complexd alpha;   // signal coherent amplitude
  complexd beta;    // local-oscillator amplitude (classical for the factist)
  double phi = 0.0; // applied phase shift
  int cutoff = 0;   // 0 = auto: joint Poisson tail below kTailTol
};

// Resolve the setup's cutoff (auto or explicit). Throws TruncationError if an
// explicit cutoff cannot hold the joint tail below kTailTol.
int setup_cutoff(const HomodyneSetup& setup);

// beta* a + beta a^dag on a single-mode basis.
SparseMatrix factist_observable(const FockBasis& basis, complexd beta);

// a^dag b + b^dag a on modes (0, 1) of a two-mode basis.
SparseMatrix fictionist_observable(const FockBasis& basis);

// Signal and internalized-oscillator states after the phase plate.
FockVector fictionist_pure_state(const HomodyneSetup& setup);     // |alpha e^{-i phi}>|beta>
DensityMatrix fictionist_state(const HomodyneSetup& setup);       // collective twirl of the above

// Mean intensity difference in each description, evaluated on the truncated
// states (never the closed form), so truncation error is genuinely exercised.
double factist_mean(const HomodyneSetup& setup);
double fictionist_mean(const HomodyneSetup& setup);

struct MomentComparison {
  int order = 1;
  double factist_moment = 0.0;
  double fictionist_moment = 0.0;
  double difference = 0.0;        // fictionist - factist
  bool pure_route = false;        // fictionist moment computed on the pure product state
  double factist_tail = 0.0;      // truncation masses, for the audit trail
  double fictionist_tail = 0.0;
};

// k-th moments (1 <= k <= 4) of the respective observables. The fictionist
// moment uses the twirled density matrix when the two-mode dimension is small
// and the pure product state otherwise: a^dag b + b^dag a commutes with the
// total number, so its moments are identical on the twirled and untwirled
// states (this identity is itself under test elsewhere); the density matrix at
// |beta| = 16 would need ~100 GB while the vector needs ~1 MB.
MomentComparison moment_compare(const HomodyneSetup& setup, int k);

}  // namespace focksim
