#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilhodge/hodge.hpp"

namespace nh {

struct StructureKind {
  enum Kind { Gauduchon, Balanced, SG, HSG, PSKT, PHS, HPHS, HGauduchon };
  Kind kind = Gauduchon;
  int p = 0;
  double h = 1.0;

  static StructureKind gauduchon() { return {Gauduchon}; }
  static StructureKind balanced() { return {Balanced}; }
  static StructureKind sg() { return {SG}; }
  static StructureKind hsg(double h) { return {HSG, 0, h}; }
  static StructureKind pskt(int p) { return {PSKT, p}; }
  static StructureKind phs(int p) { return {PHS, p, 1.0}; }
  static StructureKind hphs(int p, double h) { return {HPHS, p, h}; }
  static StructureKind h_gauduchon(double h) { return {HGauduchon, 0, h}; }

  // Candidate is a Hermitian metric (1,1)-form; otherwise a (p,p)-form.
  bool metric() const { return kind != PSKT && kind != PHS && kind != HPHS; }
  // Bidegree p of the form the conditions act on (omega^{n-1} for metrics).
  int form_p(int n) const { return metric() ? n - 1 : p; }
  std::string name() const;
};

struct StructureCertificate {
  StructureKind kind;
  bool certified = false;
  std::string reason;
  Form candidate;
  std::map<std::string, Form> witnesses;
  std::map<std::string, double> residuals;
  std::vector<double> positivity;  // eigenvalues, or sampled minima
  bool exact_positivity = true;
};

// Residual threshold for closedness and exactness conditions.
inline constexpr double kStructureTol = 1e-9;
// Positivity margin for certificates.
inline constexpr double kPositivityMargin = 1e-8;

StructureCertificate check_structure(const InvariantModel& m, const Form& candidate, const StructureKind& kind);

enum class SearchStatus { Found, NotFoundConclusive, Inconclusive };
const char* status_name(SearchStatus s);

struct SearchResult {
  SearchStatus status = SearchStatus::Inconclusive;
  std::optional<StructureCertificate> cert;
  double margin = 0;        // best minimal eigenvalue at trace one (exact cones)
  std::optional<MatC> dual;  // PSD matrix orthogonal to the feasible subspace
  std::string detail;
};

SearchResult find_structure(const InvariantModel& m, const StructureKind& kind, int budget = 200,
                            std::uint64_t seed = 0);

// Positivity data of a real (p,p)-form.  p = 1: the matrix h of
// a = i sum h_ab phi^a ^ conj(phi)^b.  p = n-1: the Hermitian form
// sigma -> a ^ i sigma ^ conj(sigma) normalized by the standard volume.
MatC positivity_matrix(const Form& a);
// Inverse of positivity_matrix at p = n-1.
Form form_from_positivity(int n, const MatC& x);
// Minimum over sampled decomposable test forms (general p).
double sampled_positivity(const Form& a, int samples, std::uint64_t seed);

struct MichelsohnRoot {
  Form omega;
  double residual = 0;
  double uniqueness_gap = 0;  // distance between the roots from two starts
  int iterations = 0;
};

// Positive (1,1)-form omega with omega^{n-1} = Omega.
MichelsohnRoot michelsohn_root(const InvariantModel& m, const Form& Omega);

struct AuditLine {
  std::string check;
  double h = 0;
  int p = 0;
  std::string status;  // agree, disagree, confirmed, failed, skipped, measured
  std::string detail;
};

struct AuditReport {
  std::vector<AuditLine> lines;
  bool ok() const;
};

AuditReport audit_equivalences(const InvariantModel& m, const std::vector<double>& hs, const std::vector<int>& ps,
                               std::uint64_t seed = 0);

// Proof recipe for p-SKT => hp-HS: lift Omega to a d_h d_{-1/h}-closed form and
// take the d_h-closed representative of its h-Aeppli class; returns its (p,p) part.
Form hphs_from_pskt(const InvariantModel& m, const Form& Omega, double h);

}  // namespace nh
