#include "focksim/linear_optics.hpp"

#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace focksim {

void validate_element(const NetworkElement& element, int num_modes) {
  if (const auto* bs = std::get_if<BeamSplitter>(&element)) {
    if (bs->mode_a < 0 || bs->mode_a >= num_modes || bs->mode_b < 0 || bs->mode_b >= num_modes)
      throw std::invalid_argument("beam splitter mode index out of range");
    if (bs->mode_a == bs->mode_b)
      throw std::invalid_argument("beam splitter requires two distinct modes");
    if (!(bs->transmission >= 0.0 && bs->transmission <= 1.0))
      throw std::invalid_argument("beam splitter transmission must lie in [0, 1]");
  } else {
    const auto& ps = std::get<PhaseShifter>(element);
    if (ps.mode < 0 || ps.mode >= num_modes)
      throw std::invalid_argument("phase shifter mode index out of range");
    if (!std::isfinite(ps.phi)) throw std::invalid_argument("phase shifter angle must be finite");
  }
}

void validate_network(const LinearNetwork& network) {
  if (network.num_modes < 1) throw std::invalid_argument("network needs at least one mode");
  for (const auto& e : network.elements) validate_element(e, network.num_modes);
}

Eigen::MatrixXd beam_splitter_sector(int s, double transmission) {
  if (s < 0) throw std::invalid_argument("negative photon-number sector");
  if (!(transmission >= 0.0 && transmission <= 1.0))
    throw std::invalid_argument("transmission must lie in [0, 1]");
  const long double t = std::sqrt(static_cast<long double>(transmission));
  const long double r = std::sqrt(static_cast<long double>(1.0 - transmission));

  // log k! in long double, for the (p!(s-p)!/(q!(s-q)!))^(1/2) prefactor.
  std::vector<long double> lf(s + 1, 0.0L);
  for (int k = 2; k <= s; ++k) lf[k] = lf[k - 1] + std::log(static_cast<long double>(k));
  // Binomial coefficients C(s, k) fit comfortably in long double at this scale.
  std::vector<std::vector<long double>> ch(s + 1, std::vector<long double>(s + 1, 0.0L));
  for (int n = 0; n <= s; ++n) {
    ch[n][0] = 1.0L;
    for (int k = 1; k <= n; ++k) ch[n][k] = ch[n - 1][k - 1] + (k <= n - 1 ? ch[n - 1][k] : 0.0L);
  }

  // U|q, s-q> = sum_p B[p][q] |p, s-p> from expanding
  // (t a^dag + r b^dag)^q (-r a^dag + t b^dag)^(s-q) |0,0>. The alternating
  // signs cancel heavily for middling p,q; accumulate in long double.
  Eigen::MatrixXd B(s + 1, s + 1);
  for (int q = 0; q <= s; ++q) {
    for (int p = 0; p <= s; ++p) {
      long double sum = 0.0L;
      const int ilo = std::max(0, p - (s - q));
      const int ihi = std::min(p, q);
      for (int i = ilo; i <= ihi; ++i) {
        const int j = p - i;  // creations into mode a from the second factor
        long double term = ch[q][i] * ch[s - q][j];
        term *= std::pow(t, static_cast<long double>(i + (s - q) - j));
        term *= std::pow(r, static_cast<long double>((q - i) + j));
        if (j & 1) term = -term;
        sum += term;
      }
      const long double pref =
          std::exp(0.5L * (lf[p] + lf[s - p] - lf[q] - lf[s - q]));
      B(p, q) = static_cast<double>(pref * sum);
    }
  }
  return B;
}

namespace {

// Per-sector splitter blocks for all total numbers occurring in `basis`.
std::vector<Eigen::MatrixXd> splitter_blocks(int cutoff, double transmission) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(cutoff + 1);
  for (int s = 0; s <= cutoff; ++s) blocks.push_back(beam_splitter_sector(s, transmission));
  return blocks;
}

}  // namespace

SparseMatrix element_matrix(const FockBasis& basis, const NetworkElement& element) {
  validate_element(element, basis.num_modes());
  std::vector<Eigen::Triplet<complexd>> trip;

  if (const auto* ps = std::get_if<PhaseShifter>(&element)) {
    trip.reserve(basis.dim());
    for (std::int64_t i = 0; i < basis.dim(); ++i) {
      const int n = basis.occupations(i)[ps->mode];
      trip.emplace_back(i, i, std::polar(1.0, ps->phi * n));
    }
  } else {
    const auto& bs = std::get<BeamSplitter>(element);
    const auto blocks = splitter_blocks(basis.cutoff(), bs.transmission);
    std::vector<int> occ(basis.num_modes());
    for (std::int64_t i = 0; i < basis.dim(); ++i) {
      auto o = basis.occupations(i);
      const int q = o[bs.mode_a];
      const int s = q + o[bs.mode_b];
      std::copy(o.begin(), o.end(), occ.begin());
      for (int p = 0; p <= s; ++p) {
        const double amp = blocks[s](p, q);
        if (amp == 0.0) continue;
        occ[bs.mode_a] = p;
        occ[bs.mode_b] = s - p;
        trip.emplace_back(basis.index_of(occ), i, amp);
      }
    }
  }
  SparseMatrix m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

FockVector apply_element(const FockVector& psi, const NetworkElement& element) {
  return apply_operator(element_matrix(psi.basis(), element), psi);
}

DensityMatrix apply_element(const DensityMatrix& rho, const NetworkElement& element) {
  return conjugate(element_matrix(rho.basis(), element), rho);
}

FockVector apply_network(const FockVector& psi, const LinearNetwork& network) {
  validate_network(network);
  if (network.num_modes != psi.num_modes())
    throw std::invalid_argument("network mode count does not match state");
  FockVector out = psi;
  for (const auto& e : network.elements) out = apply_element(out, e);
  return out;
}

DensityMatrix apply_network(const DensityMatrix& rho, const LinearNetwork& network) {
  validate_network(network);
  if (network.num_modes != rho.num_modes())
    throw std::invalid_argument("network mode count does not match state");
  DensityMatrix out = rho;
  for (const auto& e : network.elements) out = apply_element(out, e);
  return out;
}

FockVector split_fock(int n, double transmission, double phi, int cutoff) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  if (n > cutoff) throw std::invalid_argument("photon number exceeds cutoff");
  if (!(transmission >= 0.0 && transmission <= 1.0))
    throw std::invalid_argument("transmission must lie in [0, 1]");

  BasisPtr basis = make_basis(2, cutoff);
  Vector amps = Vector::Zero(basis->dim());
  std::vector<long double> c(n + 1, 0.0L);
  if (transmission == 0.0) {
    c[0] = 1.0L;
  } else if (transmission == 1.0) {
    c[n] = 1.0L;
  } else {
    const long double T = transmission;
    c[0] = std::pow(1.0L - T, 0.5L * n);
    for (int m = 0; m < n; ++m)
      c[m + 1] = c[m] * std::sqrt((static_cast<long double>(n - m) / (m + 1)) * (T / (1.0L - T)));
  }
  for (int m = 0; m <= n; ++m)
    amps[basis->index_of({m, n - m})] =
        static_cast<double>(c[m]) * std::polar(1.0, -phi * m);
  return FockVector(basis, std::move(amps));
}

Matrix matrix_exponential_oracle(const FockBasis& basis, const NetworkElement& element) {
  validate_element(element, basis.num_modes());
  Matrix g;
  if (const auto* bs = std::get_if<BeamSplitter>(&element)) {
    const double theta = -std::acos(std::sqrt(bs->transmission));
    g = theta * (Matrix(hop(basis, bs->mode_a, bs->mode_b)) -
                 Matrix(hop(basis, bs->mode_b, bs->mode_a)));
  } else {
    const auto& ps = std::get<PhaseShifter>(element);
    g = complexd(0.0, ps.phi) * Matrix(hop(basis, ps.mode, ps.mode));
  }
  return g.exp();
}

LinearNetwork network_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("network JSON must be an object");
  if (!j.contains("num_modes") || !j["num_modes"].is_number_integer())
    throw std::invalid_argument("network JSON needs integer field 'num_modes'");
  if (!j.contains("elements") || !j["elements"].is_array())
    throw std::invalid_argument("network JSON needs array field 'elements'");
  LinearNetwork net;
  net.num_modes = j["num_modes"].get<int>();
  for (const auto& e : j["elements"]) {
    const std::string type = e.value("type", "");
    if (type == "bs") {
      if (!e.contains("modes") || !e["modes"].is_array() || e["modes"].size() != 2)
        throw std::invalid_argument("'bs' element needs a two-entry 'modes' array");
      if (!e.contains("T")) throw std::invalid_argument("'bs' element needs field 'T'");
      net.elements.push_back(BeamSplitter{e["modes"][0].get<int>(), e["modes"][1].get<int>(),
                                          e["T"].get<double>()});
    } else if (type == "ps") {
      if (!e.contains("mode") || !e.contains("phi"))
        throw std::invalid_argument("'ps' element needs fields 'mode' and 'phi'");
      net.elements.push_back(PhaseShifter{e["mode"].get<int>(), e["phi"].get<double>()});
    } else {
      throw std::invalid_argument("unknown element type '" + type + "' (expected 'bs' or 'ps')");
    }
  }
  validate_network(net);
  return net;
}

nlohmann::json network_to_json(const LinearNetwork& network) {
  nlohmann::json elems = nlohmann::json::array();
  for (const auto& e : network.elements) {
    if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
      elems.push_back({{"type", "bs"},
                       {"modes", {bs->mode_a, bs->mode_b}},
                       {"T", bs->transmission}});
    } else {
      const auto& ps = std::get<PhaseShifter>(e);
      elems.push_back({{"type", "ps"}, {"mode", ps.mode}, {"phi", ps.phi}});
    }
  }
  return {{"num_modes", network.num_modes}, {"elements", elems}};
}

}  // namespace focksim
