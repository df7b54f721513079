#include "focksim/twirl.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "focksim/linear_optics.hpp"

namespace focksim {

namespace {

// Shared sector-projection kernel: keep (row, col) iff keep(row, col).
template <typename Keep>
DensityMatrix project_elements(const DensityMatrix& rho, Keep&& keep) {
  Matrix m = rho.matrix();
  const FockBasis& basis = rho.basis();
  for (std::int64_t r = 0; r < m.rows(); ++r)
    for (std::int64_t c = 0; c < m.cols(); ++c)
      if (!keep(basis, r, c)) m(r, c) = complexd(0);
  return DensityMatrix(rho.basis_ptr(), std::move(m), rho.discarded_mass());
}

DensityMatrix quadrature_average(const DensityMatrix& rho, int points,
                                 const Eigen::VectorXd& generator_diagonal) {
  if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
  Matrix acc = Matrix::Zero(rho.dim(), rho.dim());
  Vector phase(rho.dim());
  for (int k = 0; k < points; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / points;
    for (std::int64_t i = 0; i < rho.dim(); ++i)
      phase[i] = std::polar(1.0, theta * generator_diagonal[i]);
    acc.noalias() += phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal();
  }
  return DensityMatrix(rho.basis_ptr(), acc / points, rho.discarded_mass());
}

}  // namespace

DensityMatrix u1_twirl(const DensityMatrix& rho, int mode) {
  if (mode < 0 || mode >= rho.num_modes())
    throw std::invalid_argument("u1_twirl: mode index out of range");
  return project_elements(rho, [mode](const FockBasis& b, std::int64_t r, std::int64_t c) {
    return b.occupations(r)[mode] == b.occupations(c)[mode];
  });
}

DensityMatrix collective_twirl(const DensityMatrix& rho) {
  return project_elements(rho, [](const FockBasis& b, std::int64_t r, std::int64_t c) {
    return b.total_photons(r) == b.total_photons(c);
  });
}

DensityMatrix number_diagonal_part(const DensityMatrix& rho) {
  return project_elements(rho,
                          [](const FockBasis&, std::int64_t r, std::int64_t c) { return r == c; });
}

Eigen::Matrix2cd su2_twirl_spin_half(const Eigen::Matrix2cd& rho) {
  return (rho.trace() / 2.0) * Eigen::Matrix2cd::Identity();
}

DensityMatrix u1_twirl_quadrature(const DensityMatrix& rho, int mode, int points) {
  if (mode < 0 || mode >= rho.num_modes())
    throw std::invalid_argument("u1_twirl_quadrature: mode index out of range");
  Eigen::VectorXd gen(rho.dim());
  for (std::int64_t i = 0; i < rho.dim(); ++i) gen[i] = rho.basis().occupations(i)[mode];
  return quadrature_average(rho, points, gen);
}

DensityMatrix collective_twirl_quadrature(const DensityMatrix& rho, int points) {
  Eigen::VectorXd gen(rho.dim());
  for (std::int64_t i = 0; i < rho.dim(); ++i) gen[i] = rho.basis().total_photons(i);
  return quadrature_average(rho, points, gen);
}

Eigen::Matrix2cd pauli_twirl_oracle(const Eigen::Matrix2cd& rho) {
  Eigen::Matrix2cd x, y, z;
  x << 0, 1, 1, 0;
  y << 0, complexd(0, -1), complexd(0, 1), 0;
  z << 1, 0, 0, -1;
  return 0.25 * (rho + x * rho * x + y * rho * y + z * rho * z);
}

DensityMatrix poisson_split_mixture(complexd alpha, complexd beta, double transmission,
                                    int cutoff) {
  const double nbar = std::norm(alpha) + std::norm(beta);
  const auto [weights, tail] = poisson_weights(nbar, cutoff);
  const double phi = std::arg(beta) - std::arg(alpha);
  BasisPtr basis = make_basis(2, cutoff);
  Matrix m = Matrix::Zero(basis->dim(), basis->dim());
  for (int n = 0; n <= cutoff; ++n) {
    const FockVector psi = split_fock(n, transmission, phi, cutoff);
    m.noalias() += weights[n] * (psi.amplitudes() * psi.amplitudes().adjoint());
  }
  return DensityMatrix(basis, std::move(m), tail);
}

namespace {

// L-infinity distance between a twirled two-mode state and the Poissonian
// split-Fock model at transmission T. The model is block-diagonal in total
// photon number, so off-block elements of `twirled` contribute a T-independent
// floor and only the diagonal blocks need rebuilding per T.
struct SplitResidual {
  const DensityMatrix& twirled;
  complexd alpha, beta;
  double off_block_floor = 0.0;
  Eigen::VectorXd weights;
  std::vector<std::vector<std::int64_t>> sector_index;  // sector -> basis ranks

  SplitResidual(const DensityMatrix& rho, complexd a, complexd b)
      : twirled(rho), alpha(a), beta(b) {
    const FockBasis& basis = rho.basis();
    const int cutoff = basis.cutoff();
    sector_index.assign(cutoff + 1, {});
    for (std::int64_t i = 0; i < basis.dim(); ++i)
      sector_index[basis.total_photons(i)].push_back(i);
    for (std::int64_t r = 0; r < rho.dim(); ++r)
      for (std::int64_t c = 0; c < rho.dim(); ++c)
        if (basis.total_photons(r) != basis.total_photons(c))
          off_block_floor = std::max(off_block_floor, std::abs(rho.matrix()(r, c)));
    weights = poisson_weights(std::norm(a) + std::norm(b), cutoff).first;
  }

  double operator()(double T) const {
    const double phi = std::arg(beta) - std::arg(alpha);
    const int cutoff = twirled.cutoff();
    double worst = off_block_floor;
    for (int n = 0; n <= cutoff; ++n) {
      const FockVector psi = split_fock(n, T, phi, cutoff);
      const auto& idx = sector_index[n];
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) {
          const complexd model =
              weights[n] * psi.amp(idx[r]) * std::conj(psi.amp(idx[c]));
          worst = std::max(worst, std::abs(twirled.matrix()(idx[r], idx[c]) - model));
        }
    }
    return worst;
  }
};

}  // namespace

SplitFit fit_split_transmission(const DensityMatrix& twirled, complexd alpha, complexd beta) {
  if (twirled.num_modes() != 2)
    throw std::invalid_argument("fit_split_transmission expects a two-mode state");
  SplitResidual residual(twirled, alpha, beta);

  // Coarse bracket, then golden-section. The residual is |linear| near the
  // optimum (the twirled state lies exactly in the model family), so the
  // minimizer is sharp and golden-section converges to ~1e-12 comfortably.
  const int coarse = 201;
  double bestT = 0.5, bestR = std::numeric_limits<double>::infinity();
  for (int k = 0; k < coarse; ++k) {
    const double T = (k + 0.5) / coarse;
    const double r = residual(T);
    if (r < bestR) {
      bestR = r;
      bestT = T;
    }
  }
  double lo = std::max(0.0, bestT - 1.0 / coarse);
  double hi = std::min(1.0, bestT + 1.0 / coarse);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = residual(x1), f2 = residual(x2);
  for (int it = 0; it < 120 && hi - lo > 1e-14; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = residual(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = residual(x2);
    }
  }
  const double T = 0.5 * (lo + hi);
  return SplitFit{T, residual(T)};
}

}  // namespace focksim
