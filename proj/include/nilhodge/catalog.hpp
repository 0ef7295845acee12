#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilhodge/model.hpp"

namespace nh {

struct FamilyRange {
  std::string parameter;
  double lo = 0, hi = 0, base = 0;
};

struct CatalogEntry {
  std::string name;
  LieAlgebraPresentation presentation;
  MatC metric;                       // Hermitian coefficient matrix h of omega
  std::optional<cd> trivializing_u;  // coefficient of phi^1 ^ ... ^ phi^n
  std::optional<FamilyRange> family;
  std::vector<std::string> flags;    // advisory metadata, never used as an oracle
};

// Six-dimensional Nakamura real algebra with the complex structure
// phi^3 = (e5 + i e6 - a (e5 - i e6)) / (1 - a^2); a = 0 is complex parallelizable.
LieAlgebraPresentation fou_presentation(double a);

const std::vector<CatalogEntry>& catalog();
// Throws SchemaError for an unknown name.
const CatalogEntry& catalog_entry(const std::string& name);
// Entry with its family parameter replaced (FOU: J_a).
CatalogEntry family_member(const CatalogEntry& e, double value);

}  // namespace nh
