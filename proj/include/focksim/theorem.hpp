#pragma once

// Insensitivity of linear-optics photon counting to number coherences.
//
// A single-mode signal enters port 0 of an N-mode linear network whose other
// ports carry number-diagonal probe states; the output is photon-counted by
// error-prone detectors (stochastic confusion of the true counts), possibly
// after losses. For any such experiment the outcome distribution depends on
// the signal only through its number-diagonal part — run_experiment(rho) and
// run_experiment(diag(rho)) coincide to machine precision, exactly, not
// asymptotically: the network conserves total photon number, losses are
// vacuum-ancilla splitters traced out, and counting is diagonal, so nothing
// downstream couples to the signal's off-diagonal sectors. Replacing a probe
// with a coherent state (a homodyne local oscillator) breaks the diagonality
// precondition and the insensitivity with it, which is the point of the
// counterexample helper.

#include <cstdint>
#include <map>

#include "focksim/fock.hpp"
#include "focksim/linear_optics.hpp"
#include "focksim/rng.hpp"

namespace focksim {

struct LossEvent {
  int mode = 0;
  double probability = 0.0;  // in [0, 1]
};

// Row-stochastic confusion matrix P(reported j | true k), (cutoff+1)^2, for a
// detector of efficiency eta: reported counts are binomially thinned.
Eigen::MatrixXd binomial_confusion(double eta, int cutoff);

struct ExperimentSpec {
  int num_modes = 2;
  int cutoff = 6;
  LinearNetwork network;                     // on num_modes modes
  std::vector<DensityMatrix> probes;         // single-mode states for ports 1..N-1
  std::vector<LossEvent> losses;             // applied after the network
  std::vector<Eigen::MatrixXd> confusions;   // one per mode
  // The theorem requires number-diagonal probes; the coherent-probe
  // counterexample sets this to bypass that check deliberately.
  bool allow_nondiagonal_probes = false;

  // Throws std::invalid_argument on structural problems (mode counts, loss
  // probabilities, non-stochastic confusion rows, non-diagonal probes).
  void validate() const;
};

// Outcome tuple (reported counts per mode) -> probability; sums to 1.
using CountStatistics = std::map<std::vector<int>, double>;

// Exact outcome distribution: embed signal x probes, apply the network, apply
// losses (vacuum ancilla + splitter of transmission 1-p, ancilla traced out
// immediately so the dimension never grows by more than one mode), read the
// number-basis diagonal, push it through the confusion matrices.
CountStatistics run_experiment(const ExperimentSpec& spec, const DensityMatrix& signal);

// Largest elementwise probability difference between the two distributions.
double statistics_distance(const CountStatistics& a, const CountStatistics& b);

// Max over `trials` random signals (with number coherences, support <= 3
// photons) of the L-infinity distance between run_experiment(rho) and
// run_experiment(diag(rho)).
double offdiag_sensitivity(const ExperimentSpec& spec, int trials, std::uint64_t seed);

// Seeded random element sequence: splitters with T in [0.05, 0.95] on random
// mode pairs, shifters with random angles. depth >= 1.
LinearNetwork random_network(int num_modes, int depth, std::uint64_t seed);

// Random full experiment: random network, random diagonal probes (support
// <= 2 photons), each mode lossy with probability 1/2 (loss <= max_loss) and
// detected with a random efficiency in [min_eta, 1].
ExperimentSpec random_experiment_spec(int num_modes, int depth, int cutoff, std::uint64_t seed,
                                      double max_loss = 0.5, double min_eta = 0.5);

// Two-mode homodyne-like spec whose "probe" is a coherent state: violates the
// diagonal-probe precondition, so the insensitivity fails measurably.
ExperimentSpec coherent_probe_counterexample(int cutoff);

// Spec files extend the network JSON with probe/loss/detector blocks:
//   {"num_modes": N, "cutoff": c, "network": {...},
//    "probes": [{"weights": [w0, w1, ...]}, ...],            // ports 1..N-1
//    "losses": [{"mode": i, "probability": p}, ...],          // optional
//    "confusions": [{"eta": e} | {"matrix": [[...], ...]}, ...]}  // optional,
// confusions default to perfect detectors; probe weights are renormalized.
// The result is validate()d before being returned.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

}  // namespace focksim
