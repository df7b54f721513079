#include "focksim/rng.hpp"

namespace focksim {

FockVector random_pure(BasisPtr basis, Rng& rng) {
  Vector amps(basis->dim());
  for (std::int64_t i = 0; i < amps.size(); ++i) amps[i] = random_complex(rng);
  return FockVector(std::move(basis), std::move(amps)).normalized();
}

DensityMatrix random_density(BasisPtr basis, Rng& rng, int terms) {
  if (terms < 1) throw std::invalid_argument("random_density needs at least one term");
  Matrix m = Matrix::Zero(basis->dim(), basis->dim());
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    const double w = rng.uniform(0.1, 1.0);
    const FockVector psi = random_pure(basis, rng);
    m += w * (psi.amplitudes() * psi.amplitudes().adjoint());
    total += w;
  }
  return DensityMatrix(std::move(basis), m / total);
}

}  // namespace focksim
