#pragma once

// Versioned JSON serialization for states, plus the CSV/manifest writers the
// CLI uses. State schema (schema_version 1):
//   vector:         {schema_version, kind: "vector", num_modes, cutoff,
//                    discarded_mass, entries: [{occupations, re, im}, ...]}
//   density matrix: {schema_version, kind: "density_matrix", num_modes, cutoff,
//                    discarded_mass, entries: [{bra, ket, re, im}, ...]}
// Entries with |amplitude| < 1e-15 are omitted. Entry order is the basis
// (lexicographic) order, so serialization is deterministic.

#include <string>
#include <vector>

#include "focksim/fock.hpp"

#include "json.hpp"

namespace focksim {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kSerializeEps = 1e-15;

nlohmann::json to_json(const FockVector& psi);
nlohmann::json to_json(const DensityMatrix& rho);
FockVector vector_from_json(const nlohmann::json& j);
DensityMatrix density_from_json(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

// Minimal rectangular table -> RFC-4180-style CSV: header row, comma
// separation, LF line endings, numbers with 12 significant digits. Throws
// std::invalid_argument on ragged rows and std::runtime_error on I/O failure.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }

  std::string to_string() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// "%.12g" — 12 significant digits, deterministic for identical doubles.
std::string format_number(double v);

}  // namespace focksim
