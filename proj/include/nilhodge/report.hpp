#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nilhodge/catalog.hpp"
#include "nilhodge/deformation.hpp"

namespace nh {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

// Document schema (indices 1-based):
// { "schema_version", "name", "dim_real",
//   "structure_constants": [[k, i, j, value], ...]  (de^k = value e^i ^ e^j),
//   "complex_structure": {"type": "J", "matrix": [[...]]} | {"type": "coframe", "rows": [[[re, im], ...], ...]},
//   "metric": {"hermitian_matrix": [[[re, im], ...], ...]},
//   "trivializing_u": [re, im], "family": {"parameter", "range": [lo, hi], "base"}, "flags": [...] }
// structure_constants may also be a dense dim x dim x dim array c[k][i][j].
CatalogEntry parse_entry(const json& doc);
CatalogEntry parse_entry_text(const std::string& text);
// Presentation part only; SchemaError (with JSON pointer), DimensionOdd, RaggedConstants.
LieAlgebraPresentation parse_model(const std::string& text);

json serialize(const LieAlgebraPresentation& p);
json serialize(const CatalogEntry& e);

// Floats with 17 significant digits, keys in insertion order.
std::string dump(const json& j, int indent = 2);

// FNV-1a over the canonical dump of the presentation (name excluded).
std::string fingerprint(const LieAlgebraPresentation& p);

json to_json(cd c);
json to_json(const MatC& m);
json to_json(const VecC& v);
json to_json(const MatR& m);
// Nonzero terms {"I": [...], "J": [...], "c": [re, im]}, 1-based indices.
json to_json(const Form& f);
json to_json(const VectorValuedForm& v);

struct CheckResult {
  std::string name;
  bool pass = true;
  std::optional<double> residual;
  std::optional<double> tolerance;
  std::string detail;
};

struct RunReport {
  std::string command;
  std::string target;
  json flags = json::object();
  std::string model_name;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  json data = json::object();
  // Optional TSV table; empty means the checks are tabulated.
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool ok() const;
  // residual <= tol as a check line
  void check(const std::string& name, double residual, double tol, const std::string& detail = {});
  void check(const std::string& name, bool pass, const std::string& detail = {});
};

json to_json(const RunReport& r);
std::string to_tsv(const RunReport& r);
// Complete error document for input errors.
json error_json(const std::string& command, const Error& e);

std::string fmt_double(double x);

}  // namespace nh
