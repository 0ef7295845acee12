#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "nilhodge/exterior.hpp"

namespace nh::local {

// Exact Gaussian rational a + b i.
struct GaussQ {
  mpq_class re, im;
  GaussQ() = default;
  GaussQ(long a) : re(a), im(0) {}
  GaussQ(mpq_class a, mpq_class b) : re(std::move(a)), im(std::move(b)) {}
  bool is_zero() const { return re == 0 && im == 0; }
  GaussQ& operator+=(const GaussQ& o);
  GaussQ& operator-=(const GaussQ& o);
  friend GaussQ operator*(const GaussQ& a, const GaussQ& b);
  friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }
  cd to_complex() const { return {re.get_d(), im.get_d()}; }
};

// Exponents of z_1..z_n followed by zbar_1..zbar_n.
using Exponent = std::array<std::uint8_t, 8>;

class Poly {
 public:
  Poly() = default;
  static Poly constant(const GaussQ& c);
  static Poly monomial(const Exponent& e, const GaussQ& c);
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  // derivative in z_k (holomorphic) or zbar_k (bar = true), 0-based k
  Poly diff(int k, bool bar, int n) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const GaussQ& c);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  const std::map<Exponent, GaussQ>& terms() const { return terms_; }
  std::string str(int n) const;

 private:
  void clean();
  std::map<Exponent, GaussQ> terms_;
};

// Polynomial-coefficient form on a chart of C^n; monomial keys use the
// bit layout of the invariant model (dz bits 0..n-1, dzbar bits n..2n-1).
struct PolyForm {
  int n = 0;
  std::map<Mask, Poly> coeff;
  static PolyForm zero(int n) { return {n, {}}; }
  void add(Mask m, const Poly& p);
  bool is_zero() const { return coeff.empty(); }
  int max_degree() const;
  std::string str() const;
  PolyForm& operator+=(const PolyForm& o);
  PolyForm& operator-=(const PolyForm& o);
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
};

// zeta = sum_j zeta_j d/dz_j
struct PolyVectorField {
  int n = 0;
  std::vector<Poly> comp;
};

// sum_{S, j} c_{S j} dzbar_S (x) d/dz_j, with S a (0,q) monomial mask.
struct PolyVectorForm {
  int n = 0;
  std::map<Mask, std::vector<Poly>> comp;
  // v = sum_l v_l dzbar_l (x) d/dz_l
  static PolyVectorForm diagonal(int n, const std::vector<Poly>& v);
  static PolyVectorForm from_field(const PolyVectorField& z);
};

PolyForm wedge(const PolyForm& a, const PolyForm& b);
PolyForm del(const PolyForm& a);
PolyForm delbar(const PolyForm& a);
// Contraction by the signed deletion rule on index words.
PolyForm contract(const PolyVectorField& z, const PolyForm& a);
PolyForm contract(const PolyVectorForm& v, const PolyForm& a);
PolyVectorForm delbar(const PolyVectorField& z);
PolyVectorForm delbar(const PolyVectorForm& v);

enum class ChartOp { del, delbar, contract_field, contract_vector_form };
// Validated entry point: n <= 4 and input polynomial degree <= 4.
PolyForm chart_apply(ChartOp op, const PolyForm& a, const PolyVectorField* z = nullptr,
                     const PolyVectorForm* v = nullptr);

// Random inputs with small Gaussian-integer coefficients.
Poly random_poly(std::mt19937_64& rng, int n, int degree);
PolyForm random_form(std::mt19937_64& rng, int n, Bideg b, int degree);

struct CandidateResult {
  std::string identity;  // "a" or "b"
  std::string expression;
  int passes = 0;
  int fails = 0;
  std::string first_residual;
};

struct IdentityReport {
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<CandidateResult> candidates;
  std::string verified_a, verified_b;  // empty if no candidate holds in every trial
};

// phi of bidegree (p,q) is drawn with p, q chosen per trial; zeta and v
// have degree field_degree, phi has degree form_degree.
IdentityReport verify_lemma_contraction(int trials, std::uint64_t seed, int n, int form_degree = 2,
                                        int field_degree = 1);

}  // namespace nh::local
