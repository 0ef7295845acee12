#include "nilhodge/catalog.hpp"

namespace nh {

namespace {

MatR standard_J(int n) {
  MatR J = MatR::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    J(2 * j + 1, 2 * j) = 1;
    J(2 * j, 2 * j + 1) = -1;
  }
  return J;
}

LieAlgebraPresentation abelian(const std::string& name, int n) {
  LieAlgebraPresentation p;
  p.name = name;
  p.dim_real = 2 * n;
  p.J = standard_J(n);
  return p;
}

CatalogEntry make(LieAlgebraPresentation p, std::vector<std::string> flags, bool cy = true) {
  CatalogEntry e;
  const int n = p.dim_real / 2;
  e.name = p.name;
  e.presentation = std::move(p);
  e.metric = MatC::Identity(n, n);
  if (cy) e.trivializing_u = cd(1, 0);
  e.flags = std::move(flags);
  return e;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> out;
  out.push_back(make(abelian("torus2", 2), {"kahler", "ddbar"}));
  out.push_back(make(abelian("torus3", 3), {"kahler", "ddbar"}));
  {
    // de5 = -e13 + e24, de6 = -e14 - e23
    auto p = abelian("iwasawa", 3);
    p.constants = {{4, 0, 2, -1}, {4, 1, 3, 1}, {5, 0, 3, -1}, {5, 1, 2, -1}};
    out.push_back(make(std::move(p), {"complex_parallelizable", "balanced", "not_ddbar"}));
  }
  {
    // de4 = e12
    auto p = abelian("kodaira_thurston", 2);
    p.constants = {{3, 0, 1, 1}};
    out.push_back(make(std::move(p), {"not_kahler", "not_ddbar"}));
  }
  {
    auto p = fou_presentation(0.0);
    p.name = "nakamura";
    out.push_back(make(std::move(p), {"complex_parallelizable", "solvmanifold"}));
  }
  {
    auto p = fou_presentation(0.5);
    p.name = "fou";
    auto e = make(std::move(p), {"balanced", "calabi_yau", "ddbar", "solvmanifold"});
    e.family = FamilyRange{"a", 0.3, 0.7, 0.5};
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

LieAlgebraPresentation fou_presentation(double a) {
  if (std::abs(a) >= 1.0) throw Error(ErrorKind::NotAlmostComplex, "family parameter must satisfy |a| < 1");
  LieAlgebraPresentation p;
  p.name = "fou";
  p.dim_real = 6;
  // de1 = e15 - e26, de2 = e16 + e25, de3 = -e35 + e46, de4 = -e36 - e45
  p.constants = {{0, 0, 4, 1},  {0, 1, 5, -1}, {1, 0, 5, 1},  {1, 1, 4, 1},
                 {2, 2, 4, -1}, {2, 3, 5, 1},  {3, 2, 5, -1}, {3, 3, 4, -1}};
  MatC P = MatC::Zero(3, 6);
  const cd i(0, 1);
  P(0, 0) = 1;
  P(0, 1) = i;
  P(1, 2) = 1;
  P(1, 3) = i;
  P(2, 4) = 1.0 / (1.0 + a);
  P(2, 5) = i / (1.0 - a);
  p.coframe = P;
  return p;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = build_catalog();
  return c;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw Error(ErrorKind::SchemaError, "unknown catalog entry '" + name + "'");
}

CatalogEntry family_member(const CatalogEntry& e, double value) {
  if (!e.family) throw Error(ErrorKind::SchemaError, "entry '" + e.name + "' has no family");
  CatalogEntry out = e;
  out.presentation = fou_presentation(value);
  out.presentation.name = e.name;
  return out;
}

}  // namespace nh
