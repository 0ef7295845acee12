#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "nilhodge/linalg.hpp"

namespace nh {

// Monomials are bitmasks over ordered generators.  For the complex
// exterior algebra of a complex n-dimensional model the generators are
// phi^1..phi^n (bits 0..n-1) followed by conj(phi)^1..conj(phi)^n
// (bits n..2n-1), so the canonical monomial is phi^I ^ conj(phi)^J.
using Mask = std::uint32_t;

struct Bideg {
  int p = 0, q = 0;
  auto operator<=>(const Bideg&) const = default;
  int k() const { return p + q; }
};

int popcount(Mask m);
// Sign of a ^ b, 0 if they share a generator.
int wedge_sign(Mask a, Mask b);
// Interior product of the dual vector of generator g with a monomial:
// returns the sign and writes the remaining monomial.
int interior_sign(int g, Mask m, Mask& rest);

// Multi-indices of size k from {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k);
long binom(int n, int k);

class ExteriorBasis {
 public:
  explicit ExteriorBasis(int n);
  int n() const { return n_; }
  int dim(Bideg b) const;
  int dim_total(int k) const;
  Mask mask(Bideg b, int idx) const { return masks_.at(b)[idx]; }
  const std::vector<Mask>& masks(Bideg b) const { return masks_.at(b); }
  // (bidegree, index) of a canonical monomial
  std::pair<Bideg, int> locate(Mask m) const { return where_.at(m); }
  std::vector<Bideg> bidegrees(int k) const;
  int offset(Bideg b) const;  // offset inside the degree-k stacked vector
  Bideg bideg_of(Mask m) const;
  Mask top() const { return (Mask(1) << (2 * n_)) - 1; }

 private:
  int n_;
  std::map<Bideg, std::vector<Mask>> masks_;
  std::map<Mask, std::pair<Bideg, int>> where_;
};

const ExteriorBasis& basis(int n);

// A form: coefficient vectors per bidegree in the basis above.
class Form {
 public:
  Form() = default;
  explicit Form(int n) : n_(n) {}
  static Form zero(int n, Bideg b);
  static Form block(int n, Bideg b, const VecC& v);
  // I, J are 1-based index lists (not necessarily sorted).
  static Form monomial(int n, std::vector<int> I, std::vector<int> J, cd c = 1.0);
  static Form scalar(int n, cd c);
  static Form from_total(int n, int k, const VecC& v);

  int n() const { return n_; }
  bool has(Bideg b) const { return blocks_.count(b) > 0; }
  VecC component(Bideg b) const;
  Form part(Bideg b) const;
  void set(Bideg b, const VecC& v);
  void add(Bideg b, const VecC& v);
  std::vector<Bideg> degrees() const;
  bool pure() const { return blocks_.size() == 1; }
  Bideg bideg() const;  // requires pure
  VecC total(int k) const;
  double norm() const;  // Euclidean norm of all coefficients
  bool is_zero(double tol = 0.0) const { return norm() <= tol; }

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  Form& operator*=(cd s);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(cd s, Form a) { return a *= s; }
  friend Form operator*(double s, Form a) { return a *= cd(s); }
  Form operator-() const { Form r = *this; r *= -1.0; return r; }

  const std::map<Bideg, VecC>& blocks() const { return blocks_; }

 private:
  int n_ = 0;
  std::map<Bideg, VecC> blocks_;
};

Form wedge(const Form& a, const Form& b);
Form power(const Form& a, int k);
Form conjugate(const Form& a);
bool is_real(const Form& a, double tol = 1e-12);
cd top_coefficient(const Form& a);

// Sign matrix of conjugation Lambda^{p,q} -> Lambda^{q,p} acting on conj(coefficients).
MatC conjugation_matrix(int n, Bideg b);
// Matrix of a -> w ^ a from Lambda^{b} to Lambda^{b + deg w}.
MatC wedge_matrix(const Form& w, Bideg b);

// zeta = sum_j zeta_j Z_j with Z_j the frame dual to phi^j.
Form contract(const VecC& zeta, const Form& a);
// Antiholomorphic frame contraction (dual to conj(phi)^j).
Form contract_bar(const VecC& xi, const Form& a);

// Element of Lambda^{0,q} (x) T^{1,0}: rows index the (0,q) basis, columns the frame Z_j.
struct VectorValuedForm {
  int n = 0;
  int q = 0;
  MatC coeff;
  static VectorValuedForm zero(int n, int q);
  static VectorValuedForm from_vector(int n, int q, const VecC& flat);
  VecC flat() const;  // row-major flattening, index J * n + j
};
// v -| a = sum conj(phi)^J ^ (Z_j -| a)
Form contract(const VectorValuedForm& v, const Form& a);
// Matrix of v -> v -| a from flattened Lambda^{0,q} (x) T^{1,0} to the result bidegree.
MatC contraction_matrix(const Form& a, int q);

// Full exterior algebra over g generators, indexed directly by mask.
using AlgVec = Eigen::VectorXcd;
// Image of a monomial under the substitution  gen_i -> sum_b l(i, b) gen_b.
AlgVec substitute_monomial(const MatC& l, Mask m);
AlgVec substitute(const MatC& l, const AlgVec& x);
AlgVec alg_wedge(const AlgVec& a, const AlgVec& b);
AlgVec to_alg(const Form& f);
Form from_alg(int n, const AlgVec& x);

}  // namespace nh
