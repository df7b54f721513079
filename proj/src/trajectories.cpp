#include "focksim/trajectories.hpp"

#include <cmath>
#include <numbers>

namespace focksim {

namespace {

constexpr double kVacuumTol = 1e-12;

void check_two_modes(int num_modes) {
  if (num_modes != 2) throw std::invalid_argument("detection expects a two-mode state");
}

// J_c = (a - b)/sqrt(2) (sign = -1) or J_d = (a + b)/sqrt(2) (sign = +1).
SparseMatrix jump_operator(const FockBasis& basis, int sign) {
  const double s = 1.0 / std::sqrt(2.0);
  SparseMatrix a = mode_operator(basis, 0, ModeOp::annihilation);
  SparseMatrix b = mode_operator(basis, 1, ModeOp::annihilation);
  return SparseMatrix(s * a + (sign * s) * b);
}

}  // namespace

DetectionResult detect_one(const FockVector& psi, Rng& rng) {
  check_two_modes(psi.num_modes());
  const Vector jc = jump_operator(psi.basis(), -1) * psi.amplitudes();
  const Vector jd = jump_operator(psi.basis(), +1) * psi.amplitudes();
  const double wc = jc.squaredNorm();
  const double wd = jd.squaredNorm();
  if (wc + wd < kVacuumTol) throw std::invalid_argument("cannot detect on a vacuum state");
  const double p_c = wc / (wc + wd);
  const bool clicked_c = rng.uniform01() < p_c;
  Vector post = clicked_c ? jc : jd;
  post /= post.norm();
  return DetectionResult{clicked_c ? Port::c : Port::d, p_c,
                         FockVector(psi.basis_ptr(), std::move(post), psi.discarded_mass())};
}

DetectionResultMixed detect_one(const DensityMatrix& rho, Rng& rng) {
  check_two_modes(rho.num_modes());
  const SparseMatrix jc = jump_operator(rho.basis(), -1);
  const SparseMatrix jd = jump_operator(rho.basis(), +1);
  Matrix mc = jc * rho.matrix() * SparseMatrix(jc.adjoint());
  Matrix md = jd * rho.matrix() * SparseMatrix(jd.adjoint());
  const double wc = mc.trace().real();
  const double wd = md.trace().real();
  if (wc + wd < kVacuumTol) throw std::invalid_argument("cannot detect on a vacuum state");
  const double p_c = wc / (wc + wd);
  const bool clicked_c = rng.uniform01() < p_c;
  Matrix post = clicked_c ? (mc / wc) : (md / wd);
  return DetectionResultMixed{clicked_c ? Port::c : Port::d, p_c,
                              DensityMatrix(rho.basis_ptr(), std::move(post),
                                            rho.discarded_mass())};
}

double PhasePosterior::entropy() const {
  double h = 0.0;
  for (double w : weights)
    if (w > 0.0) h -= w * std::log(w);
  return h;
}

double PhasePosterior::peak() const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < weights.size(); ++j)
    if (weights[j] > weights[best]) best = j;
  return grid[best];
}

double PhasePosterior::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double cum = 0.0;
  std::size_t j = weights.size() - 1;  // fall through to the last cell on roundoff
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) {
      j = i;
      break;
    }
  }
  const double cell = 2.0 * std::numbers::pi / grid.size();
  double theta = grid[j] + (rng.uniform01() - 0.5) * cell;
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta -= 2.0 * std::numbers::pi;
  return theta;
}

PhasePosterior phase_posterior(const FockVector& psi, int grid_points) {
  check_two_modes(psi.num_modes());
  if (grid_points < 2) throw std::invalid_argument("posterior grid needs at least two points");
  const FockBasis& basis = psi.basis();

  // Locate the (single) occupied total-number sector.
  std::vector<double> sector_mass(basis.cutoff() + 1, 0.0);
  for (std::int64_t i = 0; i < psi.dim(); ++i)
    sector_mass[basis.total_photons(i)] += std::norm(psi.amp(i));
  int M = 0;
  for (int s = 1; s <= basis.cutoff(); ++s)
    if (sector_mass[s] > sector_mass[M]) M = s;
  double off = 0.0;
  for (int s = 0; s <= basis.cutoff(); ++s)
    if (s != M) off += sector_mass[s];
  if (off > kDerivedTol)
    throw std::invalid_argument("phase posterior needs a definite total photon number");

  PhasePosterior post;
  post.grid.resize(grid_points);
  post.weights.assign(grid_points, 1.0 / grid_points);
  for (int j = 0; j < grid_points; ++j)
    post.grid[j] = 2.0 * std::numbers::pi * j / grid_points;
  if (M == 0) return post;  // no photons left: no phase information

  std::vector<complexd> sector(M + 1);
  for (int m = 0; m <= M; ++m) sector[m] = psi.amp(basis.index_of({m, M - m}));

  double total = 0.0;
  for (int j = 0; j < grid_points; ++j) {
    complexd overlap = 0.0;
    for (int m = 0; m <= M; ++m)
      overlap += sector[m] * std::polar(1.0, -post.grid[j] * m);
    post.weights[j] = std::norm(overlap);
    total += post.weights[j];
  }
  for (double& w : post.weights) w /= total;
  return post;
}

namespace {

double visibility_from_moments(double intensity_sum, complexd cross, int grid_points) {
  if (grid_points < 4) throw std::invalid_argument("visibility sweep needs at least four points");
  if (intensity_sum < kVacuumTol)
    throw std::invalid_argument("visibility undefined for a zero-intensity state");
  // Literal sweep of the port-d rate under a test phase phi on mode 0:
  // I(phi) = (<N_a + N_b> + 2 Re(e^{-i phi} <a^dag b>)) / 2.
  std::vector<double> swept(grid_points);
  for (int j = 0; j < grid_points; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / grid_points;
    swept[j] = 0.5 * (intensity_sum + 2.0 * (std::polar(1.0, -phi) * cross).real());
  }
  // The sweep is a pure first harmonic; recover mean and amplitude exactly.
  double mean = 0.0;
  complexd first = 0.0;
  for (int j = 0; j < grid_points; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / grid_points;
    mean += swept[j];
    first += swept[j] * std::polar(1.0, -phi);
  }
  mean /= grid_points;
  const double amplitude = 2.0 * std::abs(first) / grid_points;
  const double imax = mean + amplitude;
  const double imin = mean - amplitude;
  return (imax - imin) / (imax + imin);
}

}  // namespace

double visibility(const FockVector& psi, int grid_points) {
  check_two_modes(psi.num_modes());
  const FockBasis& basis = psi.basis();
  const double nn = (expectation(psi, hop(basis, 0, 0)) + expectation(psi, hop(basis, 1, 1))).real();
  const complexd cross = expectation(psi, hop(basis, 0, 1));
  return visibility_from_moments(nn, cross, grid_points);
}

double visibility(const DensityMatrix& rho, int grid_points) {
  check_two_modes(rho.num_modes());
  const FockBasis& basis = rho.basis();
  const double nn = (expectation(rho, hop(basis, 0, 0)) + expectation(rho, hop(basis, 1, 1))).real();
  const complexd cross = expectation(rho, hop(basis, 0, 1));
  return visibility_from_moments(nn, cross, grid_points);
}

LocalizationRun run_localization(int n, int k, std::uint64_t seed, int grid_points) {
  if (n < 1) throw std::invalid_argument("need at least one photon per mode");
  if (k < 0 || k > 2 * n - 1)
    throw std::invalid_argument("detection count must lie in [0, 2n-1] so fringes stay definable");

  BasisPtr basis = make_basis(2, 2 * n);
  Rng rng(seed);

  std::vector<TrajectoryStep> steps;
  steps.reserve(k);
  FockVector state = fock_state(basis, {n, n});
  for (int step = 0; step < k; ++step) {
    DetectionResult det = detect_one(state, rng);
    state = std::move(det.post_state);
    const PhasePosterior post = phase_posterior(state, grid_points);
    steps.push_back(TrajectoryStep{det.outcome, det.p_c, visibility(state, grid_points),
                                   post.entropy(), post.peak()});
  }
  const double sample = phase_posterior(state, grid_points).sample(rng);
  return LocalizationRun{seed,
                         n,
                         grid_points,
                         std::log(static_cast<double>(grid_points)),
                         std::move(steps),
                         std::move(state),
                         sample};
}

}  // namespace focksim
