#pragma once

// Group-averaging superoperators. The U(1) integrals
//   (1/2pi) int dtheta e^{i theta N} rho e^{-i theta N}
// (N = one mode's number, or the total number for the collective version) have
// the closed form "zero every matrix element between distinct eigenvalues of
// N", which is what the twirls implement — exactly, no quadrature. Uniform
// angle-grid quadrature versions are kept alongside as independent test
// oracles: an L-point grid reproduces the integral exactly whenever every
// occurring eigenvalue difference of N is smaller than L in magnitude, which
// holds for all in-scope cutoffs at L = 64... callers needing more pass more.

#include "focksim/fock.hpp"

namespace focksim {

// Erase coherences between different photon numbers of one mode.
DensityMatrix u1_twirl(const DensityMatrix& rho, int mode);

// Erase coherences between different *total* photon-number sectors.
DensityMatrix collective_twirl(const DensityMatrix& rho);

// Zero every off-diagonal element in the occupation basis (the simultaneous
// twirl over all modes); the part of rho a photon-counting measurement sees.
DensityMatrix number_diagonal_part(const DensityMatrix& rho);

// Average of R rho R^dag over SO(3) rotations of a spin-1/2: forced to
// tr(rho)/2 * I by irreducibility, returned exactly.
Eigen::Matrix2cd su2_twirl_spin_half(const Eigen::Matrix2cd& rho);

// Quadrature oracles (uniform angle grids; see header comment).
DensityMatrix u1_twirl_quadrature(const DensityMatrix& rho, int mode, int points = 64);
DensityMatrix collective_twirl_quadrature(const DensityMatrix& rho, int points = 64);

// Pauli-group average (1/4) sum_k sigma_k rho sigma_k — a discrete oracle that
// must coincide with su2_twirl_spin_half.
Eigen::Matrix2cd pauli_twirl_oracle(const Eigen::Matrix2cd& rho);

// The collective twirl of a two-mode coherent product |alpha>|beta> is a
// Poissonian mixture over total photon number of beam-split Fock states:
//   sum_N p_N(|alpha|^2+|beta|^2) |psi_N(T, phi)><psi_N(T, phi)|
// with psi_N = split_fock(N, T, phi) and phi = arg(beta) - arg(alpha).
DensityMatrix poisson_split_mixture(complexd alpha, complexd beta, double transmission,
                                    int cutoff);

struct SplitFit {
  double transmission;  // argmin of the elementwise residual
  double residual;      // L-infinity distance at the fitted transmission
};

// Fit the splitter transmission that makes poisson_split_mixture match a given
// twirled state, by golden-section search on the L-infinity residual. Near the
// true T the residual is |linear|, so the minimizer localizes to ~1e-12.
SplitFit fit_split_transmission(const DensityMatrix& twirled, complexd alpha, complexd beta);

}  // namespace focksim
