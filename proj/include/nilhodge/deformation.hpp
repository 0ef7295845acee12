#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilhodge/catalog.hpp"
#include "nilhodge/representatives.hpp"
#include "nilhodge/structures.hpp"

namespace nh {

// Closed nowhere-zero (n,0)-form and its pairing v -> v -| u.
struct TrivializingForm {
  Form u;
  std::map<int, MatC> pairing;  // q -> matrix from flattened (0,q) (x) T^{1,0} to Lambda^{n-1,q}
  cd wedge_top = 0;             // top coefficient of u ^ conj(u)

  const MatC& T(int q) const { return pairing.at(q); }
  VectorValuedForm pull_back(const Form& a, int q) const;  // inverse of T(q) on a pure (n-1,q)-form
};

// NoTrivializer if u is not a nonzero closed (n,0)-form.
TrivializingForm make_trivializer(const InvariantModel& m, const Form& u);
// u = c phi^1 ^ ... ^ phi^n from the catalog coefficient; NoTrivializer when absent.
TrivializingForm catalog_trivializer(const CatalogEntry& e, const InvariantModel& m);

// delbar on Lambda^{0,q} (x) T^{1,0} from brackets: delbar Z_j = sum_b conj(phi)^b (x) [conj(Z)_b, Z_j]^{1,0}.
MatC vector_dbar(const InvariantModel& m, int q);
// Same operator transported through the pairing: T(q+1)^{-1} delbar T(q).
MatC transported_dbar(const InvariantModel& m, const TrivializingForm& u, int q);

struct TangentClass {
  VecC coords;
  VectorValuedForm v;
};

// H^{0,1}(T^{1,0}) as the pullback of Dolbeault H^{n-1,1}: coordinates of [v]
// are the Dolbeault coordinates of [v -| u].
struct TangentCohomology {
  int n = 0;
  int dim = 0;
  CohomologyGroup dolbeault;  // H^{n-1,1}
  CohomologyGroup aeppli;     // H_A^{n-1,1}
  TrivializingForm u;
  MatC dbar0, dbar1;          // transported delbar on q = 0, 1
  MatC reps;                  // flattened (0,1) (x) T^{1,0}, one column per class

  VecC coordinates(const VectorValuedForm& v) const;  // NotInSubspace if not closed
  TangentClass class_of(const VectorValuedForm& v) const;
  TangentClass class_from_coords(const VecC& coords) const;
  // delbar zeta for a vector field zeta in T^{1,0}
  VectorValuedForm dbar(const VecC& zeta) const;
};

TangentCohomology tangent_cohomology(const InvariantModel& m, const TrivializingForm& u);

// Tangent classes with [v -| Omega]_A = 0 in H_A^{n-2,n}, Omega the omega-minimal
// d-closed representative of [omega^{n-1}]_A.
struct CopolarisedSubspace {
  Form omega_power;            // Omega
  MatC condition;              // Aeppli coordinates of v -| Omega per tangent coordinate
  MatC dolbeault_condition;    // Dolbeault coordinates of the same forms
  MatC basis;                  // orthonormal kernel of condition (tangent coordinates)
  MatC dolbeault_basis;
  int dim = 0;
  int dolbeault_dim = 0;
  double gauge_residual = 0;   // max Aeppli coordinate of delbar(zeta) -| Omega over samples
  int gauge_trials = 0;

  bool contains(const VecC& coords, double tol = 1e-9) const;
  bool dolbeault_contains(const VecC& coords, double tol = 1e-9) const;
};

// LemmaRequired without the ddbar-lemma; NotInSubspace if omega is not Gauduchon.
CopolarisedSubspace copolarised_subspace(const HermitianMetric& g, const TangentCohomology& tc, int gauge_trials = 20,
                                         std::uint64_t seed = 0);
// Same with an explicit d-closed (n-1,n-1)-form in place of the minimal representative.
CopolarisedSubspace copolarised_subspace(const HermitianMetric& g, const TangentCohomology& tc, const Form& Omega,
                                         int gauge_trials = 20, std::uint64_t seed = 0);

// Aeppli coordinates of v -| Omega in H_A^{n-2,n}.
VecC copolarisation_class(const InvariantModel& m, const VectorValuedForm& v, const Form& Omega);

// Classes with [v -| omega]_dbar = 0 in H^{0,2}; NotInSubspace unless v -| omega is delbar-closed for all v.
struct PolarisedSubspace {
  MatC basis;
  int dim = 0;
};
PolarisedSubspace polarised_subspace(const HermitianMetric& g, const TangentCohomology& tc);

// Image of the co-polarised subspace in H_A^{n-1,1}.
struct GprimSpace {
  MatC aeppli_basis;  // orthonormal, Aeppli coordinates
  int dim = 0;
  bool contains(const VecC& aeppli_coords, double tol = 1e-9) const;
};

GprimSpace gprim_space(const HermitianMetric& g, const TangentCohomology& tc, const CopolarisedSubspace& cs);
// Aeppli coordinates of [v -| u] for a tangent class.
VecC aeppli_image(const TangentCohomology& tc, const VecC& coords);

struct PrimitivityReport {
  VecC coords;
  // (i) the Aeppli-harmonic representative of [v -| u]
  Form harmonic;
  double harmonic_primitivity = 0;  // |omega ^ harmonic|
  bool harmonic_primitive = false;
  // (ii) v -| Omega = delbar(omega^{n-3} ^ v0 + zeta -| Omega), v0 primitive (1,2)
  Form v0;
  VecC zeta;
  double decomposition_residual = 0;
  int decomposition_nullity = 0;
  // (iii) d(v -| omega) = 0 versus Delta_A(v -| omega^{n-1}) = 0 on the designated representative
  double d_v_omega = 0;
  double laplacian_v_omega = 0;
  bool closed = false, harmonic_contraction = false;
  bool equivalence_agrees = false;
};

// NotInSubspace if the class is not co-polarised.
PrimitivityReport primitivity_report(const HermitianMetric& g, const TangentCohomology& tc,
                                     const CopolarisedSubspace& cs, const VecC& coords);

struct ModuliMetrics {
  MatC g1, g1_tensor, g2, gamma;  // entry (i, j) pairs basis column j with column i
  double denominator = 0;         // i^{n^2} int u ^ conj(u)
  double volume = 0;              // int dV
  std::vector<Form> reps;         // minimal d-closed representatives of [v -| u]_A
  std::vector<double> prim_norm2, zeta_norm2;
  double g2_formula_residual = 0;
  double gamma_formula_residual = 0;
  double difference_residual = 0;  // max |(g2 - gamma)_ii - 4 |zeta_i|^2 / denominator|
  double g1_discrepancy = 0;       // |g1 - g1_tensor|
};

// basis: tangent coordinates, one column per direction.
ModuliMetrics moduli_metrics(const HermitianMetric& g, const TangentCohomology& tc, const MatC& basis);

struct DeformationOptions {
  int order = 2;
  bool newton = true;  // complete the truncated series to an exact invariant solution
  std::vector<double> hs = {2.0};
  std::vector<int> ps;  // p-SKT / hp-HS degrees; empty means {1, n-1}
  bool structures = true;
  double gauss_manin_step = 0.05;
};

struct Fibre {
  double t = 0;
  VectorValuedForm beltrami;
  std::optional<InvariantModel> model;
  bool integrable = false;
  double mc_residual = 0;
  std::string error;
  std::optional<Form> u;
  std::optional<Form> omega;      // Michelsohn root of the (n-1,n-1) part of Omega
  double copolar_projection = 0;  // distance of the (n-2,n) part of Omega from Im del + Im delbar
};

struct OpennessLine {
  double t = 0;
  std::string check;
  bool base = false, fibre = false;
  bool retained() const { return !base || fibre; }
};

struct OpennessReport {
  std::vector<OpennessLine> lines;
  bool ok() const;
};

struct GaussManinCheck {
  double step = 0;
  double error = 0;
  double tolerance = 0;
  double predicted_norm = 0;
  bool ok = false;
};

struct DeformationFamily {
  std::vector<double> grid;
  std::vector<VectorValuedForm> orders;  // Beltrami coefficients of t^1, t^2, ...
  std::vector<Fibre> fibres;
  OpennessReport report;
  std::optional<GaussManinCheck> gauss_manin;
};

std::vector<double> default_grid();

// Integrability residual of the Beltrami differential phi (rows (0,1), columns frame):
// d phi_t^j ^ phi_t^1 ^ ... ^ phi_t^n with phi_t^j = phi^j + phi -| phi^j.
VecC mc_residual(const InvariantModel& m, const VectorValuedForm& phi);

// Invariant family through v: order-by-order Maurer-Cartan solution, per-fibre
// lemma, structure and co-polarisation checks.  MCObstructed when an order has
// no invariant solution.  The metric enables co-polarisation and Gauss-Manin checks.
DeformationFamily deform_family(const InvariantModel& m, const TangentClass& v, const std::vector<double>& grid,
                                const DeformationOptions& opt = {}, const HermitianMetric* metric = nullptr);

// Catalog family fibres at parameter base + t.
DeformationFamily catalog_family(const CatalogEntry& e, const std::vector<double>& grid,
                                 const DeformationOptions& opt = {});

}  // namespace nh
