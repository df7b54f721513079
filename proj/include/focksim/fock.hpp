#pragma once

// Truncated multimode Fock space: basis enumeration, pure states, density
// matrices, canonical mode operators, composition and reduction.
//
// Truncation policy: one *total* photon-number cutoff shared by all modes (not a
// per-mode cap). Every operation in scope conserves or lowers total photon
// number, so number sectors stay closed under the whole pipeline and truncation
// never leaks probability between sectors. Basis tuples (n_1,...,n_m) with
// sum n_i <= cutoff are ordered lexicographically; dim = C(cutoff + m, m).
// Probability discarded by any truncating step is carried on the state as
// metadata, never silently dropped.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace focksim {

using complexd = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<complexd>;

// Construction-level tolerance (normalization, hermiticity of fresh objects).
inline constexpr double kConstructionTol = 1e-12;
// Tolerance for derived quantities (propagated roundoff allowed).
inline constexpr double kDerivedTol = 1e-10;
// Maximum probability a truncation may discard before it is a hard error.
inline constexpr double kTailTol = 1e-12;

// Raised when a truncation would discard more probability than kTailTol, or
// when a caller-supplied cutoff cannot represent the requested state.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumerates occupation tuples (n_1,...,n_m) with sum <= cutoff, lexicographic
// order (last mode varies fastest). Immutable; share via BasisPtr.
class FockBasis {
 public:
  FockBasis(int num_modes, int cutoff);

  int num_modes() const { return num_modes_; }
  int cutoff() const { return cutoff_; }
  std::int64_t dim() const { return dim_; }

  std::span<const int> occupations(std::int64_t index) const {
    return {states_.data() + index * num_modes_, static_cast<std::size_t>(num_modes_)};
  }
  int total_photons(std::int64_t index) const { return totals_[index]; }

  // Rank of an occupation tuple; throws std::invalid_argument for negative
  // entries, wrong arity, or sum > cutoff.
  std::int64_t index_of(std::span<const int> occupations) const;
  std::int64_t index_of(std::initializer_list<int> occupations) const {
    return index_of(std::span<const int>(occupations.begin(), occupations.size()));
  }

  bool operator==(const FockBasis& other) const {
    return num_modes_ == other.num_modes_ && cutoff_ == other.cutoff_;
  }

 private:
  int num_modes_;
  int cutoff_;
  std::int64_t dim_;
  std::vector<int> states_;  // flat, stride num_modes_
  std::vector<int> totals_;
  // pascal_[n][k] = C(n, k), n <= cutoff + num_modes + 1, k <= num_modes + 1;
  // used for O(num_modes) ranking via cumulative sector counts.
  std::vector<std::vector<std::int64_t>> pascal_;

  std::int64_t choose(int n, int k) const { return pascal_[n][k]; }
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr make_basis(int num_modes, int cutoff);

// Pure state on a truncated Fock basis. The raw constructor takes amplitudes
// as-is (intermediate results may be unnormalized); factory functions below
// always return unit-norm states. discarded_mass accumulates the probability
// lost to truncation across the operations that produced this state.
class FockVector {
 public:
  FockVector(BasisPtr basis, Vector amplitudes, double discarded_mass = 0.0);

  const FockBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  int num_modes() const { return basis_->num_modes(); }
  int cutoff() const { return basis_->cutoff(); }
  std::int64_t dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  complexd amp(std::int64_t index) const { return amps_[index]; }
  double discarded_mass() const { return discarded_mass_; }

  double norm() const { return amps_.norm(); }
  FockVector normalized() const;
  bool is_normalized(double tol = kConstructionTol) const;
  complexd inner(const FockVector& other) const;  // <this|other>

 private:
  BasisPtr basis_;
  Vector amps_;
  double discarded_mass_;
};

// Mixed state on a truncated Fock basis. validate() performs the full
// invariant check (hermiticity 1e-12, unit trace 1e-10, eigenvalues >= -1e-10);
// the constructor itself only checks dimensions so that intermediate algebra
// stays cheap.
class DensityMatrix {
 public:
  DensityMatrix(BasisPtr basis, Matrix matrix, double discarded_mass = 0.0);

  const FockBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  int num_modes() const { return basis_->num_modes(); }
  int cutoff() const { return basis_->cutoff(); }
  std::int64_t dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  double discarded_mass() const { return discarded_mass_; }

  double trace_real() const { return mat_.trace().real(); }
  bool is_hermitian(double tol = kConstructionTol) const;
  DensityMatrix normalized() const;
  // Throws std::invalid_argument if hermiticity / trace / positivity fail.
  void validate(double hermitian_tol = kConstructionTol, double trace_tol = kDerivedTol,
                double eigen_tol = kDerivedTol) const;

 private:
  BasisPtr basis_;
  Matrix mat_;
  double discarded_mass_;
};

// --- state factories ---------------------------------------------------------

// Unit vector on the given occupation tuple; throws if the tuple violates the
// cutoff.
FockVector fock_state(BasisPtr basis, std::span<const int> occupations);
FockVector fock_state(BasisPtr basis, std::initializer_list<int> occupations);

// Single-mode coherent state with amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!),
// renormalized after truncation. The pre-normalization tail mass is recorded on
// the state; if it exceeds kTailTol the call throws TruncationError (the caller
// must pick an adequate cutoff, see coherent_cutoff).
FockVector coherent_state(complexd alpha, int cutoff);

// Smallest cutoff whose Poisson tail beyond it is < kTailTol for mean photon
// number nbar. Convenience for callers sizing a basis around coherent states.
int coherent_cutoff(double nbar);

// Poisson number weights p_n = e^{-nbar} nbar^n / n! for n = 0..cutoff,
// renormalized; tail recorded via the returned pair's second element.
std::pair<Eigen::VectorXd, double> poisson_weights(double nbar, int cutoff);

// Diagonal mixture with Poissonian weights; throws TruncationError when the
// tail beyond the cutoff exceeds kTailTol.
DensityMatrix poisson_mixture(double nbar, int cutoff);

// Diagonal single-mode density matrix from explicit weights (renormalized).
DensityMatrix diagonal_mixture(BasisPtr basis, const Eigen::VectorXd& weights);

DensityMatrix pure_density(const FockVector& psi);

// --- composition / reduction -------------------------------------------------

// Product state on num_modes(a) + num_modes(b) modes. Requires equal cutoffs;
// the result keeps that cutoff, so joint components with total photon number
// above it are discarded (mass recorded, state renormalized).
FockVector tensor(const FockVector& a, const FockVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Reduced density matrix on the kept modes (indices ascending). Trace is
// preserved exactly up to roundoff.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

// --- operators and expectations ----------------------------------------------

enum class ModeOp { annihilation, creation, number };

// Matrix of a / a^dag / N for one mode on the truncated space. a^dag columns
// that would leave the cutoff are zero (truncated creation); a^dag a still
// matches N everywhere — including the top sector, since a lowers before
// a^dag raises — up to the ulp of sqrt(k)^2.
SparseMatrix mode_operator(const FockBasis& basis, int mode, ModeOp kind);

// Hopping operator a_i^dag a_j (i may equal j, giving N_i).
SparseMatrix hop(const FockBasis& basis, int i, int j);

complexd expectation(const FockVector& psi, const SparseMatrix& op);
complexd expectation(const FockVector& psi, const Matrix& op);
complexd expectation(const DensityMatrix& rho, const SparseMatrix& op);
complexd expectation(const DensityMatrix& rho, const Matrix& op);

FockVector apply_operator(const SparseMatrix& op, const FockVector& psi);
// U rho U^dag for an (approximately) unitary sparse map.
DensityMatrix conjugate(const SparseMatrix& u, const DensityMatrix& rho);

}  // namespace focksim
