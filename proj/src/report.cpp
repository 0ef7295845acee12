#include "nilhodge/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace nh {

namespace {

[[noreturn]] void schema(const std::string& ptr, const std::string& msg) {
  throw Error(ErrorKind::SchemaError, (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

const json& field(const json& j, const std::string& ptr, const std::string& key) {
  if (!j.is_object()) schema(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(ptr + "/" + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) schema(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) schema(ptr, "expected an integer");
  return j.get<int>();
}

cd complex_number(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) schema(ptr, "expected a number or [re, im]");
  return {number(j[0], ptr + "/0"), number(j[1], ptr + "/1")};
}

const json& array(const json& j, const std::string& ptr, std::optional<std::size_t> size = {}) {
  if (!j.is_array()) schema(ptr, "expected an array");
  if (size && j.size() != *size) schema(ptr, "expected " + std::to_string(*size) + " elements");
  return j;
}

MatC complex_matrix(const json& j, const std::string& ptr, int rows, int cols) {
  array(j, ptr, rows);
  MatC m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string pr = ptr + "/" + std::to_string(r);
    array(j[r], pr, cols);
    for (int c = 0; c < cols; ++c) m(r, c) = complex_number(j[r][c], pr + "/" + std::to_string(c));
  }
  return m;
}

using Key = std::tuple<int, int, int>;

std::vector<StructureConstant> sparse_constants(const json& sc, const std::string& ptr, int dim) {
  std::map<Key, double> given;
  for (std::size_t t = 0; t < sc.size(); ++t) {
    const std::string pt = ptr + "/" + std::to_string(t);
    array(sc[t], pt, 4);
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      idx[a] = integer(sc[t][a], pt + "/" + std::to_string(a));
      if (idx[a] < 1 || idx[a] > dim)
        throw Error(ErrorKind::RaggedConstants, pt + ": index " + std::to_string(idx[a]) + " outside 1.." + std::to_string(dim));
    }
    const double v = number(sc[t][3], pt + "/3");
    if (idx[1] == idx[2] && v != 0)
      throw Error(ErrorKind::RaggedConstants, pt + ": nonzero diagonal constant");
    const Key key{idx[0] - 1, idx[1] - 1, idx[2] - 1};
    auto [it, fresh] = given.emplace(key, v);
    if (!fresh && it->second != v) throw Error(ErrorKind::RaggedConstants, pt + ": conflicting duplicate");
  }
  std::map<Key, double> canon;
  for (const auto& [key, v] : given) {
    auto [k, i, j] = key;
    if (i == j) continue;
    const Key flip{k, j, i};
    auto f = given.find(flip);
    if (f != given.end() && std::abs(f->second + v) > 1e-12 * std::max(1.0, std::abs(v)))
      throw Error(ErrorKind::RaggedConstants, ptr + ": c[" + std::to_string(k + 1) + "][" + std::to_string(i + 1) + "][" +
                                                  std::to_string(j + 1) + "] != -c[" + std::to_string(k + 1) + "][" +
                                                  std::to_string(j + 1) + "][" + std::to_string(i + 1) + "]");
    if (i < j)
      canon[key] = v;
    else if (f == given.end())
      canon[flip] = -v;
  }
  std::vector<StructureConstant> out;
  for (const auto& [key, v] : canon)
    if (v != 0) out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
  return out;
}

std::vector<StructureConstant> dense_constants_json(const json& sc, const std::string& ptr, int dim) {
  auto ragged = [&](const std::string& p) {
    throw Error(ErrorKind::RaggedConstants, p + ": dense constants must be " + std::to_string(dim) + " x " +
                                                std::to_string(dim) + " x " + std::to_string(dim));
  };
  if (static_cast<int>(sc.size()) != dim) ragged(ptr);
  std::vector<StructureConstant> out;
  for (int k = 0; k < dim; ++k) {
    const std::string pk = ptr + "/" + std::to_string(k);
    if (!sc[k].is_array() || static_cast<int>(sc[k].size()) != dim) ragged(pk);
    for (int i = 0; i < dim; ++i) {
      const std::string pi = pk + "/" + std::to_string(i);
      if (!sc[k][i].is_array() || static_cast<int>(sc[k][i].size()) != dim) ragged(pi);
    }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const std::string pij = pk + "/" + std::to_string(i) + "/" + std::to_string(j);
        const double v = number(sc[k][i][j], pij);
        const double w = number(sc[k][j][i], pk + "/" + std::to_string(j) + "/" + std::to_string(i));
        if (std::abs(v + w) > 1e-12 * std::max(1.0, std::abs(v)))
          throw Error(ErrorKind::RaggedConstants, pij + ": c[k][i][j] != -c[k][j][i]");
        if (i < j && v != 0) out.push_back({k, i, j, v});
      }
  }
  return out;
}

LieAlgebraPresentation presentation_of(const json& doc) {
  if (!doc.is_object()) schema("", "expected an object");
  if (auto it = doc.find("schema_version"); it != doc.end() && (!it->is_number_integer() || it->get<int>() != kSchemaVersion))
    schema("/schema_version", "unsupported schema version");
  LieAlgebraPresentation p;
  const json& name = field(doc, "", "name");
  if (!name.is_string()) schema("/name", "expected a string");
  p.name = name.get<std::string>();
  p.dim_real = integer(field(doc, "", "dim_real"), "/dim_real");
  if (p.dim_real <= 0 || p.dim_real % 2)
    throw Error(ErrorKind::DimensionOdd, "/dim_real: " + std::to_string(p.dim_real) + " is not a positive even integer");
  const int dim = p.dim_real, n = dim / 2;

  const json& sc = array(field(doc, "", "structure_constants"), "/structure_constants");
  const bool dense = !sc.empty() && sc[0].is_array() && !sc[0].empty() && sc[0][0].is_array();
  p.constants = dense ? dense_constants_json(sc, "/structure_constants", dim)
                      : sparse_constants(sc, "/structure_constants", dim);

  const json& cs = field(doc, "", "complex_structure");
  const json& type = field(cs, "/complex_structure", "type");
  if (type == "J") {
    const MatC J = complex_matrix(field(cs, "/complex_structure", "matrix"), "/complex_structure/matrix", dim, dim);
    if (J.imag().norm() != 0) schema("/complex_structure/matrix", "J must be real");
    p.J = J.real();
  } else if (type == "coframe") {
    p.coframe = complex_matrix(field(cs, "/complex_structure", "rows"), "/complex_structure/rows", n, dim);
  } else {
    schema("/complex_structure/type", "expected \"J\" or \"coframe\"");
  }
  return p;
}

void dump_rec(const json& j, int indent, int level, std::string& out) {
  auto newline = [&](int l) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * l), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_rec(it.value(), indent, level + 1, out);
      }
      newline(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& x : j) flat = flat && !x.is_structured();
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat || indent < 0 ? (indent < 0 ? "," : ", ") : ",";
        if (!flat) newline(level + 1);
        dump_rec(j[i], indent, level + 1, out);
      }
      if (!flat) newline(level);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string fmt_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

CatalogEntry parse_entry(const json& doc) {
  CatalogEntry e;
  e.presentation = presentation_of(doc);
  e.name = e.presentation.name;
  const int n = e.presentation.dim_real / 2;
  if (auto it = doc.find("metric"); it != doc.end()) {
    const MatC h = complex_matrix(field(*it, "/metric", "hermitian_matrix"), "/metric/hermitian_matrix", n, n);
    if ((h - h.adjoint()).norm() > 1e-12) schema("/metric/hermitian_matrix", "matrix is not Hermitian");
    e.metric = h;
  } else {
    e.metric = MatC::Identity(n, n);
  }
  if (auto it = doc.find("trivializing_u"); it != doc.end() && !it->is_null())
    e.trivializing_u = complex_number(*it, "/trivializing_u");
  if (auto it = doc.find("family"); it != doc.end() && !it->is_null()) {
    FamilyRange f;
    const json& par = field(*it, "/family", "parameter");
    if (!par.is_string()) schema("/family/parameter", "expected a string");
    f.parameter = par.get<std::string>();
    const json& r = array(field(*it, "/family", "range"), "/family/range", 2);
    f.lo = number(r[0], "/family/range/0");
    f.hi = number(r[1], "/family/range/1");
    if (!(f.lo <= f.hi)) schema("/family/range", "expected lo <= hi");
    f.base = it->contains("base") ? number((*it)["base"], "/family/base") : 0.5 * (f.lo + f.hi);
    e.family = f;
  }
  if (auto it = doc.find("flags"); it != doc.end()) {
    array(*it, "/flags");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) schema("/flags/" + std::to_string(i), "expected a string");
      e.flags.push_back((*it)[i].get<std::string>());
    }
  }
  return e;
}

CatalogEntry parse_entry_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    schema("", std::string("invalid JSON: ") + ex.what());
  }
  return parse_entry(doc);
}

LieAlgebraPresentation parse_model(const std::string& text) { return parse_entry_text(text).presentation; }

json to_json(cd c) { return json::array({c.real(), c.imag()}); }

json to_json(const MatC& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

json to_json(const VecC& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const MatR& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json to_json(const Form& f) {
  const int n = f.n();
  json terms = json::array();
  for (const auto& [b, v] : f.blocks())
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) < 1e-15) continue;
      const Mask m = basis(n).mask(b, i);
      json I = json::array(), J = json::array();
      for (int a = 0; a < n; ++a) {
        if (m >> a & 1) I.push_back(a + 1);
        if (m >> (n + a) & 1) J.push_back(a + 1);
      }
      terms.push_back({{"I", I}, {"J", J}, {"c", to_json(v(i))}});
    }
  return {{"n", n}, {"terms", terms}};
}

json to_json(const VectorValuedForm& v) {
  json terms = json::array();
  for (int r = 0; r < v.coeff.rows(); ++r)
    for (int j = 0; j < v.coeff.cols(); ++j) {
      if (std::abs(v.coeff(r, j)) < 1e-15) continue;
      const Mask m = basis(v.n).mask({0, v.q}, r);
      json J = json::array();
      for (int a = 0; a < v.n; ++a)
        if (m >> (v.n + a) & 1) J.push_back(a + 1);
      terms.push_back({{"J", J}, {"Z", j + 1}, {"c", to_json(v.coeff(r, j))}});
    }
  return {{"n", v.n}, {"q", v.q}, {"terms", terms}};
}

json serialize(const LieAlgebraPresentation& p) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = p.name;
  doc["dim_real"] = p.dim_real;
  std::map<Key, double> canon;
  for (const auto& c : p.constants) {
    if (c.i == c.j) continue;
    if (c.i < c.j)
      canon[{c.k, c.i, c.j}] += c.value;
    else
      canon[{c.k, c.j, c.i}] -= c.value;
  }
  json sc = json::array();
  for (const auto& [key, v] : canon)
    if (v != 0) sc.push_back({std::get<0>(key) + 1, std::get<1>(key) + 1, std::get<2>(key) + 1, v});
  doc["structure_constants"] = sc;
  if (p.coframe)
    doc["complex_structure"] = {{"type", "coframe"}, {"rows", to_json(*p.coframe)}};
  else if (p.J)
    doc["complex_structure"] = {{"type", "J"}, {"matrix", to_json(*p.J)}};
  return doc;
}

json serialize(const CatalogEntry& e) {
  json doc = serialize(e.presentation);
  doc["name"] = e.name;
  doc["metric"] = {{"hermitian_matrix", to_json(e.metric)}};
  if (e.trivializing_u) doc["trivializing_u"] = to_json(*e.trivializing_u);
  if (e.family)
    doc["family"] = {{"parameter", e.family->parameter}, {"range", {e.family->lo, e.family->hi}}, {"base", e.family->base}};
  doc["flags"] = e.flags;
  return doc;
}

std::string fingerprint(const LieAlgebraPresentation& p) {
  json doc = serialize(p);
  doc.erase("name");
  const std::string s = dump(doc, -1);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool RunReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void RunReport::check(const std::string& name, double residual, double tol, const std::string& detail) {
  checks.push_back({name, std::isfinite(residual) && residual <= tol, residual, tol, detail});
}

void RunReport::check(const std::string& name, bool pass, const std::string& detail) {
  checks.push_back({name, pass, std::nullopt, std::nullopt, detail});
}

json to_json(const RunReport& r) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["tool"] = "nilhodge";
  out["tool_version"] = kToolVersion;
  out["command"] = {{"name", r.command}, {"target", r.target}, {"flags", r.flags}};
  out["model"] = {{"name", r.model_name}, {"fingerprint", r.fingerprint}};
  out["seed"] = r.seed;
  out["ok"] = r.ok();
  json checks = json::array();
  for (const auto& c : r.checks) {
    json j = {{"name", c.name}, {"pass", c.pass}};
    if (c.residual) j["residual"] = *c.residual;
    if (c.tolerance) j["tolerance"] = *c.tolerance;
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(j);
  }
  out["checks"] = checks;
  out["data"] = r.data;
  return out;
}

std::string to_tsv(const RunReport& r) {
  auto clean = [](std::string s) {
    for (char& c : s)
      if (c == '\t' || c == '\n') c = ' ';
    return s;
  };
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "\t" : "") << clean(cells[i]);
    os << '\n';
  };
  if (!r.columns.empty()) {
    line(r.columns);
    for (const auto& row : r.rows) line(row);
  } else {
    line({"check", "pass", "residual", "tolerance", "detail"});
    for (const auto& c : r.checks)
      line({c.name, c.pass ? "true" : "false", c.residual ? fmt_double(*c.residual) : "",
            c.tolerance ? fmt_double(*c.tolerance) : "", c.detail});
  }
  return os.str();
}

json error_json(const std::string& command, const Error& e) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["tool"] = "nilhodge";
  out["tool_version"] = kToolVersion;
  out["command"] = {{"name", command}};
  out["ok"] = false;
  out["error"] = {{"kind", error_name(e.kind)}, {"message", e.what()}};
  return out;
}

}  // namespace nh
