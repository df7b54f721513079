#include <doctest.h>

#include <cmath>
#include <numbers>

#include "focksim/homodyne.hpp"
#include "focksim/twirl.hpp"

using namespace focksim;

namespace {

// Closed-form moments of beta* a + beta a^dag on |alpha_eff>: a Gaussian with
// mean mu = 2 Re(beta* alpha_eff) and variance |beta|^2.
double factist_moment_oracle(complexd alpha_eff, complexd beta, int k) {
  const double mu = 2.0 * std::real(std::conj(beta) * alpha_eff);
  const double v = std::norm(beta);
  switch (k) {
    case 1: return mu;
    case 2: return mu * mu + v;
    case 3: return mu * mu * mu + 3.0 * mu * v;
    case 4: return mu * mu * mu * mu + 6.0 * mu * mu * v + 3.0 * v * v;
    default: return 0.0;
  }
}

}  // namespace

TEST_CASE("homodyne: observables are hermitian and the fictionist one conserves number") {
  auto b1 = make_basis(1, 8);
  SparseMatrix fa = factist_observable(*b1, {0.5, 1.5});
  CHECK(Matrix(SparseMatrix(fa - SparseMatrix(fa.adjoint()))).cwiseAbs().maxCoeff() == 0.0);

  auto b2 = make_basis(2, 6);
  SparseMatrix fi = fictionist_observable(*b2);
  CHECK(Matrix(SparseMatrix(fi - SparseMatrix(fi.adjoint()))).cwiseAbs().maxCoeff() == 0.0);
  SparseMatrix n = hop(*b2, 0, 0) + hop(*b2, 1, 1);
  CHECK(Matrix(SparseMatrix(fi * n - n * fi)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("homodyne: the fictionist pure state is the phase-shifted coherent product") {
  HomodyneSetup s{{0.8, 0.3}, {1.1, 0.0}, 0.7, 0};
  int cutoff = setup_cutoff(s);
  auto psi = fictionist_pure_state(s);
  auto expect = tensor(coherent_state(s.alpha * std::polar(1.0, -s.phi), cutoff),
                       coherent_state(s.beta, cutoff));
  CHECK((psi.amplitudes() - expect.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("homodyne: factist moments match the closed form") {
  for (double phi : {0.0, 0.9}) {
    HomodyneSetup s{{1.0, 0.5}, {2.0, -1.0}, phi, 0};
    complexd alpha_eff = s.alpha * std::polar(1.0, -phi);
    for (int k = 1; k <= 4; ++k) {
      auto mc = moment_compare(s, k);
      CHECK(std::abs(mc.factist_moment - factist_moment_oracle(alpha_eff, s.beta, k)) < 1e-8);
    }
  }
}

TEST_CASE("homodyne: first moments of the two descriptions coincide") {
  for (double phi : {0.0, std::numbers::pi / 4, 1.9}) {
    HomodyneSetup s{{1.0, 1.0}, {2.0, 0.0}, phi, 0};
    CHECK(std::abs(factist_mean(s) - fictionist_mean(s)) < 1e-8);
    auto mc = moment_compare(s, 1);
    CHECK(std::abs(mc.factist_moment - factist_mean(s)) < 1e-10);
    CHECK(std::abs(mc.fictionist_moment - fictionist_mean(s)) < 1e-10);
  }
}

TEST_CASE("homodyne: the second-moment gap is the signal strength, independent of the oscillator") {
  // <(a^dag b + b^dag a)^2> - <(beta* a + beta a^dag)^2> = |alpha|^2 exactly:
  // the relative-number operator sees the signal's own photon shot noise, the
  // classical-oscillator operator does not. This is why raw moment differences
  // are compared per unit oscillator strength elsewhere.
  for (complexd beta : {complexd{2.0, 0.0}, complexd{0.0, 3.0}}) {
    HomodyneSetup s{{1.2, -0.5}, beta, 0.4, 0};
    auto mc = moment_compare(s, 2);
    CHECK(std::abs(mc.difference - std::norm(s.alpha)) < 1e-8);
  }
}

TEST_CASE("homodyne: twirled-matrix and pure-state routes agree") {
  HomodyneSetup s{{0.9, 0.2}, {1.4, 0.7}, 0.3, 0};
  int cutoff = setup_cutoff(s);
  auto b = make_basis(2, cutoff);
  SparseMatrix obs = fictionist_observable(*b);
  auto psi = fictionist_pure_state(s);
  auto rho = fictionist_state(s);
  for (int k = 1; k <= 4; ++k) {
    SparseMatrix pow = obs;
    for (int j = 1; j < k; ++j) pow = SparseMatrix(pow * obs);
    CHECK(std::abs(expectation(psi, pow) - expectation(rho, pow)) < 1e-10);
  }
}

TEST_CASE("homodyne: large oscillators switch to the pure route and keep the identity") {
  HomodyneSetup s{{1.0, 0.0}, {8.0, 0.0}, 0.0, 0};
  auto mc = moment_compare(s, 2);
  CHECK(mc.pure_route);
  CHECK(std::abs(mc.difference - 1.0) < 1e-7);

  HomodyneSetup small{{1.0, 0.0}, {2.0, 0.0}, 0.0, 0};
  CHECK_FALSE(moment_compare(small, 2).pure_route);
}

TEST_CASE("homodyne: degenerate amplitudes give zero means") {
  HomodyneSetup no_signal{{0.0, 0.0}, {2.0, 0.0}, 0.5, 0};
  CHECK(std::abs(factist_mean(no_signal)) < 1e-12);
  CHECK(std::abs(fictionist_mean(no_signal)) < 1e-12);
  HomodyneSetup no_lo{{1.0, 0.0}, {0.0, 0.0}, 0.5, 0};
  CHECK(std::abs(factist_mean(no_lo)) < 1e-12);
  CHECK(std::abs(fictionist_mean(no_lo)) < 1e-12);
}

TEST_CASE("homodyne: cutoff resolution and argument validation") {
  HomodyneSetup s{{1.0, 0.0}, {2.0, 0.0}, 0.0, 0};
  int autoc = setup_cutoff(s);
  CHECK(autoc >= coherent_cutoff(5.0));
  s.cutoff = 3;  // cannot hold a 5-photon-mean joint state
  CHECK_THROWS_AS(setup_cutoff(s), TruncationError);
  s.cutoff = 0;
  CHECK_THROWS_AS(moment_compare(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(moment_compare(s, 5), std::invalid_argument);
}
