#include "focksim/homodyne.hpp"

#include <cmath>

#include "focksim/linear_optics.hpp"
#include "focksim/twirl.hpp"

namespace focksim {

namespace {

// Above this two-mode dimension the fictionist moment switches to the pure
// product-state route (see header).
constexpr std::int64_t kDenseDimLimit = 3000;

double poisson_tail(double nbar, int cutoff) {
  double p = std::exp(-nbar), sum = p;
  for (int n = 1; n <= cutoff; ++n) {
    p *= nbar / n;
    sum += p;
  }
  return std::max(0.0, 1.0 - sum);
}

}  // namespace

int setup_cutoff(const HomodyneSetup& setup) {
  const double nbar = std::norm(setup.alpha) + std::norm(setup.beta);
  if (setup.cutoff == 0) return coherent_cutoff(nbar);
  if (setup.cutoff < 0) throw std::invalid_argument("cutoff must be positive (or 0 for auto)");
  if (poisson_tail(nbar, setup.cutoff) > kTailTol)
    throw TruncationError("cutoff " + std::to_string(setup.cutoff) +
                          " cannot hold the joint coherent tail below tolerance");
  return setup.cutoff;
}

SparseMatrix factist_observable(const FockBasis& basis, complexd beta) {
  if (basis.num_modes() != 1)
    throw std::invalid_argument("factist observable lives on a single mode");
  SparseMatrix a = mode_operator(basis, 0, ModeOp::annihilation);
  return SparseMatrix(std::conj(beta) * a + beta * SparseMatrix(a.adjoint()));
}

SparseMatrix fictionist_observable(const FockBasis& basis) {
  if (basis.num_modes() != 2)
    throw std::invalid_argument("fictionist observable lives on two modes");
  return SparseMatrix(hop(basis, 0, 1) + hop(basis, 1, 0));
}

FockVector fictionist_pure_state(const HomodyneSetup& setup) {
  const int cutoff = setup_cutoff(setup);
  FockVector joint = tensor(coherent_state(setup.alpha, cutoff),
                            coherent_state(setup.beta, cutoff));
  return apply_element(joint, PhaseShifter{0, -setup.phi});
}

DensityMatrix fictionist_state(const HomodyneSetup& setup) {
  return collective_twirl(pure_density(fictionist_pure_state(setup)));
}

double factist_mean(const HomodyneSetup& setup) {
  const int cutoff = setup_cutoff(setup);
  const FockVector signal = coherent_state(setup.alpha, cutoff);
  const complexd shifted_beta = setup.beta * std::polar(1.0, setup.phi);
  return expectation(signal, factist_observable(signal.basis(), shifted_beta)).real();
}

double fictionist_mean(const HomodyneSetup& setup) {
  const FockVector psi = fictionist_pure_state(setup);
  const SparseMatrix obs = fictionist_observable(psi.basis());
  if (psi.dim() <= kDenseDimLimit)
    return expectation(collective_twirl(pure_density(psi)), obs).real();
  return expectation(psi, obs).real();
}

MomentComparison moment_compare(const HomodyneSetup& setup, int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("moment order must be between 1 and 4");
  const int cutoff = setup_cutoff(setup);

  MomentComparison out;
  out.order = k;

  // Factist: <(beta* e^{-i phi} a + beta e^{i phi} a^dag)^k> on |alpha>.
  {
    const FockVector signal = coherent_state(setup.alpha, cutoff);
    out.factist_tail = signal.discarded_mass();
    const SparseMatrix x =
        factist_observable(signal.basis(), setup.beta * std::polar(1.0, setup.phi));
    FockVector v = signal;
    for (int j = 0; j < k; ++j) v = apply_operator(x, v);
    out.factist_moment = signal.inner(v).real();
  }

  // Fictionist: <(a^dag b + b^dag a)^k> on the twirled (or, equivalently for
  // this observable, untwirled) joint state.
  {
    const FockVector psi = fictionist_pure_state(setup);
    out.fictionist_tail = psi.discarded_mass();
    const SparseMatrix obs = fictionist_observable(psi.basis());
    if (psi.dim() <= kDenseDimLimit) {
      const DensityMatrix rho = collective_twirl(pure_density(psi));
      SparseMatrix power = obs;
      for (int j = 1; j < k; ++j) power = SparseMatrix((power * obs).pruned());
      out.fictionist_moment = expectation(rho, power).real();
    } else {
      out.pure_route = true;
      FockVector v = psi;
      for (int j = 0; j < k; ++j) v = apply_operator(obs, v);
      out.fictionist_moment = psi.inner(v).real();
    }
  }

  out.difference = out.fictionist_moment - out.factist_moment;
  return out;
}

}  // namespace focksim
