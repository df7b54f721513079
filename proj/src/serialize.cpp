#include "focksim/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace focksim {

namespace {

nlohmann::json state_envelope(const char* kind, int num_modes, int cutoff, double discarded) {
  return {{"schema_version", kSchemaVersion},
          {"kind", kind},
          {"num_modes", num_modes},
          {"cutoff", cutoff},
          {"discarded_mass", discarded}};
}

std::vector<int> occupations_vec(const FockBasis& basis, std::int64_t index) {
  auto occ = basis.occupations(index);
  return {occ.begin(), occ.end()};
}

void check_envelope(const nlohmann::json& j, const char* kind) {
  if (!j.is_object()) throw std::invalid_argument("state JSON must be an object");
  if (j.value("schema_version", -1) != kSchemaVersion)
    throw std::invalid_argument("unsupported state schema version");
  if (j.value("kind", "") != kind)
    throw std::invalid_argument(std::string("expected state of kind '") + kind + "'");
  for (const char* field : {"num_modes", "cutoff", "entries"})
    if (!j.contains(field))
      throw std::invalid_argument(std::string("state JSON missing field '") + field + "'");
}

std::vector<int> tuple_field(const nlohmann::json& entry, const char* field) {
  if (!entry.contains(field) || !entry[field].is_array())
    throw std::invalid_argument(std::string("state entry missing tuple field '") + field + "'");
  return entry[field].get<std::vector<int>>();
}

}  // namespace

nlohmann::json to_json(const FockVector& psi) {
  nlohmann::json j = state_envelope("vector", psi.num_modes(), psi.cutoff(),
                                    psi.discarded_mass());
  nlohmann::json entries = nlohmann::json::array();
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    const complexd a = psi.amp(i);
    if (std::abs(a) < kSerializeEps) continue;
    entries.push_back({{"occupations", occupations_vec(psi.basis(), i)},
                       {"re", a.real()},
                       {"im", a.imag()}});
  }
  j["entries"] = std::move(entries);
  return j;
}

nlohmann::json to_json(const DensityMatrix& rho) {
  nlohmann::json j = state_envelope("density_matrix", rho.num_modes(), rho.cutoff(),
                                    rho.discarded_mass());
  nlohmann::json entries = nlohmann::json::array();
  for (std::int64_t r = 0; r < rho.dim(); ++r)
    for (std::int64_t c = 0; c < rho.dim(); ++c) {
      const complexd v = rho.matrix()(r, c);
      if (std::abs(v) < kSerializeEps) continue;
      entries.push_back({{"bra", occupations_vec(rho.basis(), r)},
                         {"ket", occupations_vec(rho.basis(), c)},
                         {"re", v.real()},
                         {"im", v.imag()}});
    }
  j["entries"] = std::move(entries);
  return j;
}

FockVector vector_from_json(const nlohmann::json& j) {
  check_envelope(j, "vector");
  BasisPtr basis = make_basis(j["num_modes"].get<int>(), j["cutoff"].get<int>());
  Vector amps = Vector::Zero(basis->dim());
  for (const auto& entry : j["entries"]) {
    const auto occ = tuple_field(entry, "occupations");
    amps[basis->index_of(occ)] = complexd(entry.value("re", 0.0), entry.value("im", 0.0));
  }
  return FockVector(basis, std::move(amps), j.value("discarded_mass", 0.0));
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  check_envelope(j, "density_matrix");
  BasisPtr basis = make_basis(j["num_modes"].get<int>(), j["cutoff"].get<int>());
  Matrix m = Matrix::Zero(basis->dim(), basis->dim());
  for (const auto& entry : j["entries"]) {
    const auto bra = tuple_field(entry, "bra");
    const auto ket = tuple_field(entry, "ket");
    m(basis->index_of(bra), basis->index_of(ket)) =
        complexd(entry.value("re", 0.0), entry.value("im", 0.0));
  }
  return DensityMatrix(basis, std::move(m), j.value("discarded_mass", 0.0));
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CSV header must be nonempty");
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char ch : cell) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  auto emit_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  emit_line(header_);
  for (const auto& row : rows_) emit_line(row);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_string();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace focksim
