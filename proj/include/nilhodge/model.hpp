#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilhodge/exterior.hpp"

namespace nh {

// de^k = sum_{i<j} c[k][i][j] e^i ^ e^j on the real dual basis (0-based here).
struct StructureConstant {
  int k, i, j;
  double value;
};

struct LieAlgebraPresentation {
  std::string name;
  int dim_real = 0;
  std::vector<StructureConstant> constants;  // i < j after normalization
  std::optional<MatR> J;                     // J(i, j) = e^i(J e_j)
  std::optional<MatC> coframe;               // n x 2n, phi^a = sum_i P(a, i) e^i
};

// Dense antisymmetric tensor c[k](i, j) from the sparse list.
std::vector<MatR> dense_constants(const LieAlgebraPresentation& p);

struct OperatorTag {
  enum Kind { d, del, delbar, d_h, d_minus_inv_h, deldelbar, dh_dminusinvh, theta };
  Kind kind = d;
  double h = 1.0;
  int degree() const;  // total degree shift
  std::string name() const;
};

class InvariantModel {
 public:
  int n() const { return n_; }
  const LieAlgebraPresentation& presentation() const { return pres_; }
  // (1,0)-coframe in terms of the real coframe, and its inverse change
  const MatC& coframe() const { return P_; }
  const MatC& real_in_complex() const { return Q_; }

  // Block matrices of del and delbar leaving bidegree b.
  const MatC& del(Bideg b) const { return del_.at(b); }
  const MatC& delbar(Bideg b) const { return delbar_.at(b); }
  // Matrix from Lambda^b to Lambda^{b + (dp, dq)}; zero when the tag has no such component.
  MatC block(const OperatorTag& t, Bideg b, Bideg target) const;
  // Matrix on the stacked degree-k space.
  MatC total(const OperatorTag& t, int k) const;
  Form apply(const OperatorTag& t, const Form& a) const;

  // d of a generator of the full algebra over phi, phibar.
  const std::vector<AlgVec>& dgen() const { return dgen_; }

  // Real-coframe form e^{i1} ^ ... (0-based indices) written in the complex basis.
  Form real_monomial(const std::vector<int>& idx, double c = 1.0) const;
  // Inverse: coefficients of a form on the real monomials e^I (mask indexed).
  AlgVec to_real_coframe(const Form& f) const;

  friend InvariantModel build_model(const LieAlgebraPresentation& pres);

 private:
  int n_ = 0;
  LieAlgebraPresentation pres_;
  MatC P_, Q_;
  std::vector<AlgVec> dgen_;
  std::map<Bideg, MatC> del_, delbar_;
};

InvariantModel build_model(const LieAlgebraPresentation& pres);

// d on the full algebra given the differentials of generators (Leibniz rule).
AlgVec alg_d(const std::vector<AlgVec>& dgen, const AlgVec& x);

// Max |d^2 e^k| over degree-1 covectors of the real presentation.
double jacobi_residual(const LieAlgebraPresentation& pres);
// Exact check with the structure constants read as rationals.
bool jacobi_exact(const LieAlgebraPresentation& pres);

}  // namespace nh
