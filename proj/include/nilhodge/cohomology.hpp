#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilhodge/hodge.hpp"

namespace nh {

struct Flavor {
  enum Kind { DeRham, Dolbeault, BottChern, Aeppli, Dh, HAeppli };
  Kind kind = DeRham;
  int k = 0, p = 0, q = 0;
  double h = 1.0;

  static Flavor de_rham(int k) { return {DeRham, k, 0, 0, 1.0}; }
  static Flavor dolbeault(int p, int q) { return {Dolbeault, p + q, p, q, 1.0}; }
  static Flavor bott_chern(int p, int q) { return {BottChern, p + q, p, q, 1.0}; }
  static Flavor aeppli(int p, int q) { return {Aeppli, p + q, p, q, 1.0}; }
  static Flavor dh(int k, double h) { return {Dh, k, 0, 0, h}; }
  static Flavor h_aeppli(int k, double h) { return {HAeppli, k, 0, 0, h}; }

  // Total-degree flavors live on the stacked degree-k space.
  bool total() const { return kind == DeRham || kind == Dh || kind == HAeppli; }
  Bideg bideg() const { return {p, q}; }
  std::string name() const;
  bool operator==(const Flavor& o) const;
};

struct CohomologyGroup {
  Flavor flavor;
  int n = 0;
  int dim = 0;
  MatC cocycles;     // orthonormal basis of Z
  MatC coboundaries; // orthonormal basis of B
  MatC reps;         // representatives of a basis of Z / B
  bool harmonic = false;  // reps chosen orthogonal to B in the metric

  int space_dim() const { return static_cast<int>(cocycles.rows()); }
  bool is_cocycle(const VecC& x, double tol = 1e-9) const;
  bool is_coboundary(const VecC& x, double tol = 1e-9) const;
  // Quotient coordinates of a cocycle; NotInSubspace if x is not a cocycle.
  VecC coordinates(const VecC& x) const;
  Form to_form(const VecC& x) const;
  VecC to_vector(const Form& f) const;
};

CohomologyGroup compute_group(const InvariantModel& m, const Flavor& f, const HermitianMetric* metric = nullptr);

// Cocycle and coboundary generators (not orthonormalized) of a flavor.
MatC cocycle_operator(const InvariantModel& m, const Flavor& f);
MatC coboundary_generators(const InvariantModel& m, const Flavor& f);

struct LemmaVerdict {
  bool holds = true;
  std::string kind;      // "ddbar" or "h_ddbar"
  double h = 1.0;
  std::string location;  // first failing degree / bidegree and exactness space
  std::optional<Form> witness;
  int checks = 0;
};

LemmaVerdict check_ddbar(const InvariantModel& m);
LemmaVerdict check_h_ddbar(const InvariantModel& m, double h);

struct CohomologyClass {
  Flavor flavor;
  VecC coords;
  Form rep;
};

CohomologyClass class_of(const CohomologyGroup& g, const Form& cocycle);
CohomologyClass class_from_coords(const CohomologyGroup& g, const VecC& coords);

// Canonical maps: Dh -> DeRham (F), HAeppli -> Dh (G), DeRham -> Dh (theta_h),
// Dolbeault -> Aeppli, DeRham(k) -> Aeppli(p,q) with p + q = k.
CohomologyClass transfer_class(const InvariantModel& m, const CohomologyClass& c, const Flavor& target,
                               const HermitianMetric* metric = nullptr);

// Representative of the class of c that is closed for the target flavor,
// before quotienting (used by transfer_class and the representatives module).
Form transfer_representative(const InvariantModel& m, const CohomologyClass& c, const Flavor& target);

}  // namespace nh
