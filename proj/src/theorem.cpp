#include "focksim/theorem.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "focksim/twirl.hpp"

namespace focksim {

Eigen::MatrixXd binomial_confusion(double eta, int cutoff) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("efficiency must lie in [0, 1]");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int k = 0; k <= cutoff; ++k) {
    // P(j | k) = C(k, j) eta^j (1 - eta)^(k - j), built by recurrence.
    double p = std::pow(1.0 - eta, k);
    for (int j = 0; j <= k; ++j) {
      c(k, j) = p;
      if (j < k) {
        if (eta == 1.0) {
          p = (j + 1 == k) ? 1.0 : 0.0;  // all mass on j = k
        } else {
          p *= (static_cast<double>(k - j) / (j + 1)) * (eta / (1.0 - eta));
        }
      }
    }
  }
  return c;
}

void ExperimentSpec::validate() const {
  if (num_modes < 1) throw std::invalid_argument("experiment needs at least one mode");
  if (cutoff < 1) throw std::invalid_argument("experiment needs a positive cutoff");
  if (network.num_modes != num_modes)
    throw std::invalid_argument("network mode count does not match experiment");
  validate_network(network);
  if (static_cast<int>(probes.size()) != num_modes - 1)
    throw std::invalid_argument("need exactly one probe per non-signal mode");
  for (const auto& probe : probes) {
    if (probe.num_modes() != 1 || probe.cutoff() != cutoff)
      throw std::invalid_argument("probes must be single-mode states at the experiment cutoff");
    if (!allow_nondiagonal_probes) {
      Matrix off = probe.matrix();
      off.diagonal().setZero();
      if (off.cwiseAbs().maxCoeff() > 1e-14)
        throw std::invalid_argument("probe states must be diagonal in the number basis");
    }
  }
  for (const auto& loss : losses) {
    if (loss.mode < 0 || loss.mode >= num_modes)
      throw std::invalid_argument("loss mode index out of range");
    if (!(loss.probability >= 0.0 && loss.probability <= 1.0))
      throw std::invalid_argument("loss probability must lie in [0, 1]");
  }
  if (static_cast<int>(confusions.size()) != num_modes)
    throw std::invalid_argument("need exactly one confusion matrix per mode");
  for (const auto& c : confusions) {
    if (c.rows() != cutoff + 1 || c.cols() != cutoff + 1)
      throw std::invalid_argument("confusion matrix must be (cutoff+1) square");
    if (c.minCoeff() < 0.0) throw std::invalid_argument("confusion entries must be nonnegative");
    for (Eigen::Index k = 0; k < c.rows(); ++k)
      if (std::abs(c.row(k).sum() - 1.0) > 1e-12)
        throw std::invalid_argument("confusion rows must be probability distributions");
  }
}

namespace {

// Couple `mode` to a fresh vacuum ancilla with transmission 1 - p, then trace
// the ancilla out. One reusable ancilla keeps the dimension bounded.
DensityMatrix loss_channel(const DensityMatrix& rho, int mode, double p) {
  const int n = rho.num_modes();
  DensityMatrix extended =
      tensor(rho, pure_density(fock_state(make_basis(1, rho.cutoff()), {0})));
  extended = apply_element(extended, BeamSplitter{mode, n, 1.0 - p});
  std::vector<int> keep(n);
  for (int m = 0; m < n; ++m) keep[m] = m;
  return partial_trace(extended, keep);
}

}  // namespace

CountStatistics run_experiment(const ExperimentSpec& spec, const DensityMatrix& signal) {
  spec.validate();
  if (signal.num_modes() != 1 || signal.cutoff() != spec.cutoff)
    throw std::invalid_argument("signal must be a single-mode state at the experiment cutoff");

  DensityMatrix state = signal;
  for (const auto& probe : spec.probes) state = tensor(state, probe);
  state = apply_network(state, spec.network);
  for (const auto& loss : spec.losses) state = loss_channel(state, loss.mode, loss.probability);

  // True joint count distribution = the number-basis diagonal.
  const FockBasis& basis = state.basis();
  CountStatistics out;
  std::vector<int> reported(spec.num_modes);
  for (std::int64_t i = 0; i < basis.dim(); ++i) {
    const double p_true = state.matrix()(i, i).real();
    if (p_true <= 0.0) continue;
    auto occ = basis.occupations(i);
    // Push through the per-mode confusion matrices: recurse over modes,
    // accumulating the joint reported-count probability.
    std::function<void(int, double)> emit = [&](int mode, double weight) {
      if (mode == spec.num_modes) {
        out[reported] += weight;
        return;
      }
      const auto& conf = spec.confusions[mode];
      for (int j = 0; j <= spec.cutoff; ++j) {
        const double w = conf(occ[mode], j);
        if (w <= 0.0) continue;
        reported[mode] = j;
        emit(mode + 1, weight * w);
      }
    };
    emit(0, p_true);
  }
  return out;
}

double statistics_distance(const CountStatistics& a, const CountStatistics& b) {
  double worst = 0.0;
  for (const auto& [outcome, p] : a) {
    const auto it = b.find(outcome);
    worst = std::max(worst, std::abs(p - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [outcome, p] : b)
    if (a.find(outcome) == a.end()) worst = std::max(worst, p);
  return worst;
}

double offdiag_sensitivity(const ExperimentSpec& spec, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  Rng rng(seed);
  // Random signals with support on 0..3 photons (embedded at the experiment
  // cutoff) so runtimes stay flat while coherences are fully exercised.
  BasisPtr small = make_basis(1, std::min(3, spec.cutoff));
  BasisPtr full = make_basis(1, spec.cutoff);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const DensityMatrix rho_small = random_density(small, rng);
    Matrix embedded = Matrix::Zero(full->dim(), full->dim());
    embedded.topLeftCorner(rho_small.dim(), rho_small.dim()) = rho_small.matrix();
    const DensityMatrix rho(full, std::move(embedded));
    const double d = statistics_distance(run_experiment(spec, rho),
                                         run_experiment(spec, number_diagonal_part(rho)));
    worst = std::max(worst, d);
  }
  return worst;
}

LinearNetwork random_network(int num_modes, int depth, std::uint64_t seed) {
  if (num_modes < 1) throw std::invalid_argument("network needs at least one mode");
  if (depth < 1) throw std::invalid_argument("network depth must be >= 1");
  Rng rng(seed);
  LinearNetwork net;
  net.num_modes = num_modes;
  for (int d = 0; d < depth; ++d) {
    const bool splitter = num_modes >= 2 && rng.uniform01() < 0.7;
    if (splitter) {
      const int a = rng.uniform_int(num_modes);
      int b = rng.uniform_int(num_modes - 1);
      if (b >= a) ++b;
      net.elements.push_back(BeamSplitter{a, b, rng.uniform(0.05, 0.95)});
    } else {
      net.elements.push_back(
          PhaseShifter{rng.uniform_int(num_modes), rng.uniform(0.0, 2.0 * std::numbers::pi)});
    }
  }
  return net;
}

ExperimentSpec random_experiment_spec(int num_modes, int depth, int cutoff, std::uint64_t seed,
                                      double max_loss, double min_eta) {
  Rng rng(seed);
  ExperimentSpec spec;
  spec.num_modes = num_modes;
  spec.cutoff = cutoff;
  spec.network = random_network(num_modes, depth, rng.raw());

  BasisPtr single = make_basis(1, cutoff);
  for (int m = 1; m < num_modes; ++m) {
    // Diagonal probe with random weights on 0..2 photons.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(single->dim());
    for (int n = 0; n <= std::min(2, cutoff); ++n) w[n] = rng.uniform(0.05, 1.0);
    spec.probes.push_back(diagonal_mixture(single, w));
  }
  for (int m = 0; m < num_modes; ++m) {
    if (rng.uniform01() < 0.5)
      spec.losses.push_back(LossEvent{m, rng.uniform(0.0, max_loss)});
    spec.confusions.push_back(binomial_confusion(rng.uniform(min_eta, 1.0), cutoff));
  }
  return spec;
}

ExperimentSpec coherent_probe_counterexample(int cutoff) {
  ExperimentSpec spec;
  spec.num_modes = 2;
  spec.cutoff = cutoff;
  spec.network.num_modes = 2;
  spec.network.elements.push_back(BeamSplitter{0, 1, 0.5});
  spec.probes.push_back(pure_density(coherent_state(1.0, cutoff)));
  spec.confusions.assign(2, binomial_confusion(1.0, cutoff));
  spec.allow_nondiagonal_probes = true;
  return spec;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  try {
    spec.num_modes = j.at("num_modes").get<int>();
    spec.cutoff = j.at("cutoff").get<int>();
    spec.network = network_from_json(j.at("network"));
    auto basis = make_basis(1, spec.cutoff);
    for (const auto& probe : j.at("probes")) {
      auto ws = probe.at("weights").get<std::vector<double>>();
      if (ws.empty() || static_cast<int>(ws.size()) > spec.cutoff + 1)
        throw std::invalid_argument("probe weights must have 1.." +
                                    std::to_string(spec.cutoff + 1) + " entries");
      Eigen::VectorXd w = Eigen::VectorXd::Zero(spec.cutoff + 1);
      for (std::size_t n = 0; n < ws.size(); ++n) w[n] = ws[n];
      spec.probes.push_back(diagonal_mixture(basis, w));
    }
    for (const auto& loss : j.value("losses", nlohmann::json::array()))
      spec.losses.push_back(
          LossEvent{loss.at("mode").get<int>(), loss.at("probability").get<double>()});
    if (j.contains("confusions")) {
      for (const auto& conf : j.at("confusions")) {
        if (conf.contains("eta")) {
          spec.confusions.push_back(binomial_confusion(conf.at("eta").get<double>(), spec.cutoff));
        } else {
          auto rows = conf.at("matrix").get<std::vector<std::vector<double>>>();
          Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
          for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<Eigen::Index>(rows[r].size()) != m.cols())
              throw std::invalid_argument("confusion matrix rows must have equal length");
            for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
          }
          spec.confusions.push_back(std::move(m));
        }
      }
    } else {
      spec.confusions.assign(spec.num_modes, binomial_confusion(1.0, spec.cutoff));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
  if (spec.allow_nondiagonal_probes)
    throw std::invalid_argument(
        "spec files hold diagonal probe weights only; cannot serialize a spec "
        "with non-diagonal probes");
  nlohmann::json j;
  j["num_modes"] = spec.num_modes;
  j["cutoff"] = spec.cutoff;
  j["network"] = network_to_json(spec.network);
  j["probes"] = nlohmann::json::array();
  for (const auto& probe : spec.probes) {
    std::vector<double> w(probe.dim());
    for (std::int64_t n = 0; n < probe.dim(); ++n) w[n] = probe.matrix()(n, n).real();
    j["probes"].push_back({{"weights", w}});
  }
  j["losses"] = nlohmann::json::array();
  for (const auto& loss : spec.losses)
    j["losses"].push_back({{"mode", loss.mode}, {"probability", loss.probability}});
  j["confusions"] = nlohmann::json::array();
  for (const auto& conf : spec.confusions) {
    std::vector<std::vector<double>> rows(conf.rows());
    for (Eigen::Index r = 0; r < conf.rows(); ++r) {
      rows[r].resize(conf.cols());
      for (Eigen::Index c = 0; c < conf.cols(); ++c) rows[r][c] = conf(r, c);
    }
    j["confusions"].push_back({{"matrix", rows}});
  }
  return j;
}

}  // namespace focksim
