#include "focksim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace focksim {

namespace {

void check_mode(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.num_modes())
    throw std::invalid_argument("mode index " + std::to_string(mode) + " out of range for " +
                                std::to_string(basis.num_modes()) + " modes");
}

}  // namespace

FockBasis::FockBasis(int num_modes, int cutoff) : num_modes_(num_modes), cutoff_(cutoff) {
  if (num_modes < 1) throw std::invalid_argument("num_modes must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");

  const int pn = cutoff + num_modes + 2;
  const int pk = num_modes + 2;
  pascal_.assign(pn, std::vector<std::int64_t>(pk, 0));
  for (int n = 0; n < pn; ++n) {
    pascal_[n][0] = 1;
    for (int k = 1; k < pk && k <= n; ++k)
      pascal_[n][k] = pascal_[n - 1][k - 1] + (k <= n - 1 ? pascal_[n - 1][k] : 0);
  }

  dim_ = choose(cutoff + num_modes, num_modes);
  states_.reserve(static_cast<std::size_t>(dim_) * num_modes);
  totals_.reserve(dim_);

  // Lexicographic enumeration: leftmost mode is the most significant digit.
  std::vector<int> occ(num_modes, 0);
  while (true) {
    states_.insert(states_.end(), occ.begin(), occ.end());
    totals_.push_back(std::accumulate(occ.begin(), occ.end(), 0));
    // Advance: bump the last mode that still has budget, clearing the tail.
    int total = totals_.back();
    int i = num_modes - 1;
    while (i >= 0) {
      if (total < cutoff) {
        ++occ[i];
        break;
      }
      total -= occ[i];
      occ[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  if (static_cast<std::int64_t>(totals_.size()) != dim_)
    throw std::logic_error("basis enumeration does not match dimension formula");
}

std::int64_t FockBasis::index_of(std::span<const int> occ) const {
  if (static_cast<int>(occ.size()) != num_modes_)
    throw std::invalid_argument("occupation tuple has wrong number of modes");
  int budget = cutoff_;
  std::int64_t rank = 0;
  for (int i = 0; i < num_modes_; ++i) {
    const int n = occ[i];
    if (n < 0) throw std::invalid_argument("negative occupation number");
    if (n > budget)
      throw std::invalid_argument("occupation tuple exceeds total-photon cutoff " +
                                  std::to_string(cutoff_));
    // Tuples preceding ours at this position: first coordinate v < n, free tail.
    // sum_{v=0}^{n-1} C(budget - v + k, k) = C(budget+k+1, k+1) - C(budget-n+k+1, k+1)
    const int k = num_modes_ - 1 - i;
    rank += choose(budget + k + 1, k + 1) - choose(budget - n + k + 1, k + 1);
    budget -= n;
  }
  return rank;
}

BasisPtr make_basis(int num_modes, int cutoff) {
  return std::make_shared<const FockBasis>(num_modes, cutoff);
}

// --- FockVector ---------------------------------------------------------------

FockVector::FockVector(BasisPtr basis, Vector amplitudes, double discarded_mass)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)), discarded_mass_(discarded_mass) {
  if (!basis_) throw std::invalid_argument("null basis");
  if (amps_.size() != basis_->dim())
    throw std::invalid_argument("amplitude vector size does not match basis dimension");
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return FockVector(basis_, amps_ / n, discarded_mass_);
}

bool FockVector::is_normalized(double tol) const {
  return std::abs(amps_.squaredNorm() - 1.0) <= tol;
}

complexd FockVector::inner(const FockVector& other) const {
  if (!(basis() == other.basis())) throw std::invalid_argument("basis mismatch in inner product");
  return amps_.dot(other.amps_);  // Eigen dot conjugates the left argument
}

// --- DensityMatrix -------------------------------------------------------------

DensityMatrix::DensityMatrix(BasisPtr basis, Matrix matrix, double discarded_mass)
    : basis_(std::move(basis)), mat_(std::move(matrix)), discarded_mass_(discarded_mass) {
  if (!basis_) throw std::invalid_argument("null basis");
  if (mat_.rows() != basis_->dim() || mat_.cols() != basis_->dim())
    throw std::invalid_argument("matrix dimensions do not match basis dimension");
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix DensityMatrix::normalized() const {
  const double tr = trace_real();
  if (tr <= 0.0) throw std::invalid_argument("cannot normalize a trace-nonpositive matrix");
  return DensityMatrix(basis_, mat_ / tr, discarded_mass_);
}

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double eigen_tol) const {
  if (!is_hermitian(hermitian_tol)) throw std::invalid_argument("density matrix not Hermitian");
  if (std::abs(trace_real() - 1.0) > trace_tol)
    throw std::invalid_argument("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -eigen_tol)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

// --- state factories ------------------------------------------------------------

FockVector fock_state(BasisPtr basis, std::span<const int> occupations) {
  Vector amps = Vector::Zero(basis->dim());
  amps[basis->index_of(occupations)] = 1.0;
  return FockVector(std::move(basis), std::move(amps));
}

FockVector fock_state(BasisPtr basis, std::initializer_list<int> occupations) {
  return fock_state(std::move(basis),
                    std::span<const int>(occupations.begin(), occupations.size()));
}

FockVector coherent_state(complexd alpha, int cutoff) {
  BasisPtr basis = make_basis(1, cutoff);
  Vector amps(basis->dim());
  // c_0 = e^{-|alpha|^2/2}, c_{n+1} = c_n * alpha / sqrt(n+1): stable for the
  // in-scope |alpha| (no factorial overflow, amplitudes stay normal doubles).
  complexd c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n <= cutoff; ++n) {
    amps[n] = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  const double kept = amps.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept);
  if (tail > kTailTol)
    throw TruncationError("coherent state tail mass " + std::to_string(tail) +
                          " exceeds tolerance at cutoff " + std::to_string(cutoff));
  return FockVector(basis, amps / std::sqrt(kept), tail);
}

int coherent_cutoff(double nbar) {
  if (nbar < 0) throw std::invalid_argument("nbar must be >= 0");
  // Walk the Poisson weights until the remaining tail is safely below kTailTol.
  double w = std::exp(-nbar);
  double sum = w;
  int n = 0;
  while (1.0 - sum > 0.25 * kTailTol && n < 100000) {
    ++n;
    w *= nbar / n;
    sum += w;
  }
  return n;
}

std::pair<Eigen::VectorXd, double> poisson_weights(double nbar, int cutoff) {
  if (nbar < 0) throw std::invalid_argument("nbar must be >= 0");
  Eigen::VectorXd w(cutoff + 1);
  double p = std::exp(-nbar);
  for (int n = 0; n <= cutoff; ++n) {
    w[n] = p;
    p *= nbar / (n + 1);
  }
  const double kept = w.sum();
  const double tail = std::max(0.0, 1.0 - kept);
  w /= kept;
  return {w, tail};
}

DensityMatrix poisson_mixture(double nbar, int cutoff) {
  auto [w, tail] = poisson_weights(nbar, cutoff);
  if (tail > kTailTol)
    throw TruncationError("Poisson tail mass " + std::to_string(tail) +
                          " exceeds tolerance at cutoff " + std::to_string(cutoff));
  BasisPtr basis = make_basis(1, cutoff);
  Matrix m = Matrix::Zero(basis->dim(), basis->dim());
  for (int n = 0; n <= cutoff; ++n) m(n, n) = w[n];
  return DensityMatrix(basis, std::move(m), tail);
}

DensityMatrix diagonal_mixture(BasisPtr basis, const Eigen::VectorXd& weights) {
  if (weights.size() != basis->dim())
    throw std::invalid_argument("weight vector size does not match basis dimension");
  if (weights.minCoeff() < 0) throw std::invalid_argument("negative mixture weight");
  const double sum = weights.sum();
  if (sum <= 0) throw std::invalid_argument("mixture weights sum to zero");
  Matrix m = Matrix::Zero(basis->dim(), basis->dim());
  for (std::int64_t i = 0; i < basis->dim(); ++i) m(i, i) = weights[i] / sum;
  return DensityMatrix(std::move(basis), std::move(m));
}

DensityMatrix pure_density(const FockVector& psi) {
  return DensityMatrix(psi.basis_ptr(), psi.amplitudes() * psi.amplitudes().adjoint(),
                       psi.discarded_mass());
}

// --- composition / reduction ----------------------------------------------------

namespace {

BasisPtr joint_basis(const FockBasis& a, const FockBasis& b) {
  if (a.cutoff() != b.cutoff())
    throw std::invalid_argument("tensor requires equal cutoffs (got " +
                                std::to_string(a.cutoff()) + " and " +
                                std::to_string(b.cutoff()) + ")");
  return make_basis(a.num_modes() + b.num_modes(), a.cutoff());
}

}  // namespace

FockVector tensor(const FockVector& a, const FockVector& b) {
  BasisPtr joint = joint_basis(a.basis(), b.basis());
  const int ma = a.num_modes();
  const int mb = b.num_modes();
  std::vector<int> occ(ma + mb);
  Vector amps = Vector::Zero(joint->dim());
  double discarded = 0.0;
  for (std::int64_t i = 0; i < a.dim(); ++i) {
    const complexd ai = a.amp(i);
    if (ai == complexd(0)) continue;
    auto oa = a.basis().occupations(i);
    const int ta = a.basis().total_photons(i);
    for (std::int64_t j = 0; j < b.dim(); ++j) {
      const complexd bj = b.amp(j);
      if (bj == complexd(0)) continue;
      if (ta + b.basis().total_photons(j) > joint->cutoff()) {
        discarded += std::norm(ai * bj);
        continue;
      }
      auto ob = b.basis().occupations(j);
      std::copy(oa.begin(), oa.end(), occ.begin());
      std::copy(ob.begin(), ob.end(), occ.begin() + ma);
      amps[joint->index_of(occ)] = ai * bj;
    }
  }
  FockVector out(joint, std::move(amps), a.discarded_mass() + b.discarded_mass() + discarded);
  return discarded > 0 ? out.normalized() : out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  BasisPtr joint = joint_basis(a.basis(), b.basis());
  const int ma = a.num_modes();
  const int mb = b.num_modes();

  // Precompute the joint index (or -1 if truncated away) for each (i, j) pair.
  const std::int64_t da = a.dim(), db = b.dim();
  std::vector<std::int64_t> jointIndex(da * db, -1);
  std::vector<int> occ(ma + mb);
  double discarded = 0.0;
  for (std::int64_t i = 0; i < da; ++i) {
    auto oa = a.basis().occupations(i);
    const int ta = a.basis().total_photons(i);
    std::copy(oa.begin(), oa.end(), occ.begin());
    for (std::int64_t j = 0; j < db; ++j) {
      if (ta + b.basis().total_photons(j) > joint->cutoff()) {
        discarded += a.matrix()(i, i).real() * b.matrix()(j, j).real();
        continue;
      }
      auto ob = b.basis().occupations(j);
      std::copy(ob.begin(), ob.end(), occ.begin() + ma);
      jointIndex[i * db + j] = joint->index_of(occ);
    }
  }

  Matrix m = Matrix::Zero(joint->dim(), joint->dim());
  for (std::int64_t i = 0; i < da; ++i)
    for (std::int64_t j = 0; j < db; ++j) {
      const std::int64_t row = jointIndex[i * db + j];
      if (row < 0) continue;
      for (std::int64_t k = 0; k < da; ++k) {
        const complexd aik = a.matrix()(i, k);
        if (aik == complexd(0)) continue;
        for (std::int64_t l = 0; l < db; ++l) {
          const std::int64_t col = jointIndex[k * db + l];
          if (col < 0) continue;
          const complexd v = aik * b.matrix()(j, l);
          if (v != complexd(0)) m(row, col) = v;
        }
      }
    }
  DensityMatrix out(joint, std::move(m),
                    a.discarded_mass() + b.discarded_mass() + discarded);
  return discarded > 0 ? out.normalized() : out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const FockBasis& basis = rho.basis();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("partial_trace: duplicate mode index");
  for (int m : kept) check_mode(basis, m);
  std::vector<int> traced;
  for (int m = 0; m < basis.num_modes(); ++m)
    if (!std::binary_search(kept.begin(), kept.end(), m)) traced.push_back(m);
  if (traced.empty()) return rho;

  BasisPtr reduced = make_basis(static_cast<int>(kept.size()), basis.cutoff());

  // Map each full-basis state to (reduced index, traced-part index). Two full
  // states contribute to the reduced matrix iff their traced parts agree.
  BasisPtr tracedBasis = make_basis(static_cast<int>(traced.size()), basis.cutoff());
  const std::int64_t dim = basis.dim();
  std::vector<std::int64_t> redIdx(dim), trIdx(dim);
  std::vector<int> occKeep(kept.size()), occTr(traced.size());
  for (std::int64_t i = 0; i < dim; ++i) {
    auto occ = basis.occupations(i);
    for (std::size_t k = 0; k < kept.size(); ++k) occKeep[k] = occ[kept[k]];
    for (std::size_t k = 0; k < traced.size(); ++k) occTr[k] = occ[traced[k]];
    redIdx[i] = reduced->index_of(occKeep);
    trIdx[i] = tracedBasis->index_of(occTr);
  }

  // Group full-basis indices by traced part so the accumulation below touches
  // only matching pairs instead of all dim^2 elements.
  std::vector<std::vector<std::int64_t>> groups(tracedBasis->dim());
  for (std::int64_t i = 0; i < dim; ++i) groups[trIdx[i]].push_back(i);

  Matrix m = Matrix::Zero(reduced->dim(), reduced->dim());
  for (const auto& group : groups)
    for (std::int64_t i : group)
      for (std::int64_t j : group) m(redIdx[i], redIdx[j]) += rho.matrix()(i, j);
  return DensityMatrix(reduced, std::move(m), rho.discarded_mass());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

// --- operators -------------------------------------------------------------------

SparseMatrix mode_operator(const FockBasis& basis, int mode, ModeOp kind) {
  check_mode(basis, mode);
  std::vector<Eigen::Triplet<complexd>> trip;
  trip.reserve(basis.dim());
  std::vector<int> occ(basis.num_modes());
  for (std::int64_t i = 0; i < basis.dim(); ++i) {
    auto o = basis.occupations(i);
    const int n = o[mode];
    switch (kind) {
      case ModeOp::number:
        if (n > 0) trip.emplace_back(i, i, static_cast<double>(n));
        break;
      case ModeOp::annihilation:
        if (n > 0) {
          std::copy(o.begin(), o.end(), occ.begin());
          --occ[mode];
          trip.emplace_back(basis.index_of(occ), i, std::sqrt(static_cast<double>(n)));
        }
        break;
      case ModeOp::creation:
        // Creation out of the top total-number sector leaves the truncated
        // space; those matrix elements are simply absent.
        if (basis.total_photons(i) < basis.cutoff()) {
          std::copy(o.begin(), o.end(), occ.begin());
          ++occ[mode];
          trip.emplace_back(basis.index_of(occ), i, std::sqrt(static_cast<double>(n + 1)));
        }
        break;
    }
  }
  SparseMatrix m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix hop(const FockBasis& basis, int i, int j) {
  check_mode(basis, i);
  check_mode(basis, j);
  std::vector<Eigen::Triplet<complexd>> trip;
  trip.reserve(basis.dim());
  std::vector<int> occ(basis.num_modes());
  for (std::int64_t s = 0; s < basis.dim(); ++s) {
    auto o = basis.occupations(s);
    if (i == j) {
      if (o[i] > 0) trip.emplace_back(s, s, static_cast<double>(o[i]));
      continue;
    }
    if (o[j] == 0) continue;
    std::copy(o.begin(), o.end(), occ.begin());
    const double amp = std::sqrt(static_cast<double>(o[j]) * (o[i] + 1));
    --occ[j];
    ++occ[i];
    trip.emplace_back(basis.index_of(occ), s, amp);
  }
  SparseMatrix m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// --- expectations ------------------------------------------------------------------

namespace {

void check_dims(std::int64_t stateDim, std::int64_t opRows, std::int64_t opCols) {
  if (opRows != stateDim || opCols != stateDim)
    throw std::invalid_argument("observable dimensions do not match state dimension");
}

}  // namespace

complexd expectation(const FockVector& psi, const SparseMatrix& op) {
  check_dims(psi.dim(), op.rows(), op.cols());
  return psi.amplitudes().dot(op * psi.amplitudes());
}

complexd expectation(const FockVector& psi, const Matrix& op) {
  check_dims(psi.dim(), op.rows(), op.cols());
  return psi.amplitudes().dot(op * psi.amplitudes());
}

complexd expectation(const DensityMatrix& rho, const SparseMatrix& op) {
  check_dims(rho.dim(), op.rows(), op.cols());
  // Tr(rho O) accumulated over the nonzeros of O: sum_{ij} O(i,j) rho(j,i).
  complexd sum = 0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op, k); it; ++it)
      sum += it.value() * rho.matrix()(it.col(), it.row());
  return sum;
}

complexd expectation(const DensityMatrix& rho, const Matrix& op) {
  check_dims(rho.dim(), op.rows(), op.cols());
  return (rho.matrix() * op).trace();
}

FockVector apply_operator(const SparseMatrix& op, const FockVector& psi) {
  check_dims(psi.dim(), op.rows(), op.cols());
  return FockVector(psi.basis_ptr(), op * psi.amplitudes(), psi.discarded_mass());
}

DensityMatrix conjugate(const SparseMatrix& u, const DensityMatrix& rho) {
  check_dims(rho.dim(), u.rows(), u.cols());
  Matrix tmp = u * rho.matrix();
  return DensityMatrix(rho.basis_ptr(), tmp * u.adjoint(), rho.discarded_mass());
}

}  // namespace focksim
