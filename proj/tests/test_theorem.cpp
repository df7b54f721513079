#include <doctest.h>

#include <cmath>

#include "focksim/theorem.hpp"
#include "focksim/twirl.hpp"

using namespace focksim;

namespace {

ExperimentSpec plain_two_mode(int cutoff) {
  ExperimentSpec spec;
  spec.num_modes = 2;
  spec.cutoff = cutoff;
  spec.network = LinearNetwork{2, {BeamSplitter{0, 1, 0.5}}};
  spec.probes.push_back(pure_density(fock_state(make_basis(1, cutoff), {0})));
  spec.confusions.assign(2, binomial_confusion(1.0, cutoff));
  return spec;
}

}  // namespace

TEST_CASE("theorem: binomial confusion matrices are stochastic with correct entries") {
  for (double eta : {0.0, 0.3, 0.72, 1.0}) {
    auto c = binomial_confusion(eta, 6);
    REQUIRE(c.rows() == 7);
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(c.row(k).sum() - 1.0) < 1e-12);
  }
  CHECK((binomial_confusion(1.0, 5) - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() ==
        0.0);
  auto dark = binomial_confusion(0.0, 5);
  for (int k = 0; k <= 5; ++k) CHECK(dark(k, 0) == 1.0);
  // P(1 reported | 3 true) = C(3,1) eta (1-eta)^2.
  auto c = binomial_confusion(0.3, 5);
  CHECK(std::abs(c(3, 1) - 3 * 0.3 * 0.49) < 1e-14);
  CHECK_THROWS_AS(binomial_confusion(1.2, 5), std::invalid_argument);
}

TEST_CASE("theorem: an empty network reads out the input diagonals") {
  const int cutoff = 4;
  ExperimentSpec spec;
  spec.num_modes = 2;
  spec.cutoff = cutoff;
  spec.network = LinearNetwork{2, {}};
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cutoff + 1);
  w[0] = 0.25;
  w[2] = 0.75;
  spec.probes.push_back(diagonal_mixture(make_basis(1, cutoff), w));
  spec.confusions.assign(2, binomial_confusion(1.0, cutoff));

  auto signal = pure_density(fock_state(make_basis(1, cutoff), {1}));
  auto stats = run_experiment(spec, signal);
  CHECK(std::abs(stats.at({1, 0}) - 0.25) < 1e-12);
  CHECK(std::abs(stats.at({1, 2}) - 0.75) < 1e-12);
  double total = 0.0;
  for (const auto& [counts, p] : stats) total += p;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("theorem: a balanced splitter splits one photon evenly") {
  const int cutoff = 3;
  auto spec = plain_two_mode(cutoff);
  auto signal = pure_density(fock_state(make_basis(1, cutoff), {1}));
  auto stats = run_experiment(spec, signal);
  CHECK(std::abs(stats.at({1, 0}) - 0.5) < 1e-12);
  CHECK(std::abs(stats.at({0, 1}) - 0.5) < 1e-12);
}

TEST_CASE("theorem: losses thin the counts but preserve total probability") {
  const int cutoff = 4;
  auto spec = plain_two_mode(cutoff);
  spec.network.elements.clear();
  spec.losses.push_back(LossEvent{0, 0.4});
  auto signal = pure_density(fock_state(make_basis(1, cutoff), {2}));
  auto stats = run_experiment(spec, signal);
  // Two photons through 40% loss: binomial counts with survival 0.6.
  CHECK(std::abs(stats.at({2, 0}) - 0.36) < 1e-12);
  CHECK(std::abs(stats.at({1, 0}) - 0.48) < 1e-12);
  CHECK(std::abs(stats.at({0, 0}) - 0.16) < 1e-12);
  double total = 0.0;
  for (const auto& [counts, p] : stats) total += p;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("theorem: count statistics ignore signal number coherences") {
  auto spec = random_experiment_spec(3, 4, 5, 20260814);
  CHECK(offdiag_sensitivity(spec, 10, 7) < 1e-10);
}

TEST_CASE("theorem: a coherent probe exposes the coherences") {
  auto spec = coherent_probe_counterexample(15);
  auto b = make_basis(1, 15);
  Vector v = Vector::Zero(b->dim());
  v[b->index_of({0})] = 1.0 / std::sqrt(2.0);
  v[b->index_of({1})] = 1.0 / std::sqrt(2.0);
  auto signal = pure_density(FockVector(b, std::move(v)));
  double dev = statistics_distance(run_experiment(spec, signal),
                                   run_experiment(spec, number_diagonal_part(signal)));
  CHECK(dev > 1e-3);
}

TEST_CASE("theorem: random networks are reproducible, unitary, and sized") {
  auto n1 = random_network(3, 5, 77);
  auto n2 = random_network(3, 5, 77);
  REQUIRE(n1.elements.size() == 5);
  auto j1 = network_to_json(n1).dump();
  CHECK(j1 == network_to_json(n2).dump());
  CHECK(j1 != network_to_json(random_network(3, 5, 78)).dump());
  CHECK_THROWS_AS(random_network(3, 0, 1), std::invalid_argument);

  auto b = make_basis(3, 3);
  Matrix u = Matrix::Identity(b->dim(), b->dim());
  for (const auto& e : n1.elements) u = Matrix(element_matrix(*b, e)) * u;
  CHECK((u.adjoint() * u - Matrix::Identity(b->dim(), b->dim())).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("theorem: spec validation enforces the theorem's preconditions") {
  const int cutoff = 3;
  auto spec = plain_two_mode(cutoff);
  CHECK_NOTHROW(spec.validate());

  auto bad = spec;
  auto pb = make_basis(1, cutoff);
  Vector sup = Vector::Zero(pb->dim());
  sup[pb->index_of({0})] = 1.0 / std::sqrt(2.0);
  sup[pb->index_of({1})] = 1.0 / std::sqrt(2.0);
  bad.probes[0] = pure_density(FockVector(pb, std::move(sup)));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.allow_nondiagonal_probes = true;
  CHECK_NOTHROW(bad.validate());

  bad = spec;
  bad.losses.push_back(LossEvent{0, 1.5});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.confusions[1](0, 0) = 0.7;  // row no longer sums to one
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.probes.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("theorem: spec files round trip and reject bad documents") {
  auto spec = random_experiment_spec(3, 3, 4, 5);
  auto j = experiment_spec_to_json(spec);
  auto back = experiment_spec_from_json(j);
  CHECK(back.num_modes == spec.num_modes);
  CHECK(back.cutoff == spec.cutoff);
  CHECK(back.losses.size() == spec.losses.size());
  // The reconstructed spec drives the exact same experiment.
  auto signal = pure_density(fock_state(make_basis(1, 4), {2}));
  CHECK(statistics_distance(run_experiment(spec, signal), run_experiment(back, signal)) < 1e-12);

  auto bad = j;
  bad.erase("network");
  CHECK_THROWS_AS(experiment_spec_from_json(bad), std::invalid_argument);
  bad = j;
  bad["probes"][0]["weights"] = std::vector<double>(20, 0.05);  // beyond cutoff+1
  CHECK_THROWS_AS(experiment_spec_from_json(bad), std::invalid_argument);
  bad = j;
  bad["confusions"][0] = {{"eta", 1.7}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad), std::invalid_argument);
  // The coherent-probe counterexample is deliberately not representable.
  CHECK_THROWS_AS(experiment_spec_to_json(coherent_probe_counterexample(15)),
                  std::invalid_argument);
}

TEST_CASE("theorem: statistics distance is the largest pointwise gap") {
  CountStatistics a{{{0, 0}, 0.5}, {{1, 0}, 0.5}};
  CountStatistics b{{{0, 0}, 0.25}, {{0, 1}, 0.75}};
  CHECK(statistics_distance(a, b) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(statistics_distance(a, a) == 0.0);
}
