#pragma once

#include <map>

#include "nilhodge/model.hpp"

namespace nh {

enum class LaplacianFlavor { Aeppli, BottChern, Dolbeault };
const char* flavor_name(LaplacianFlavor f);

struct ThreeSpace {
  Form harmonic, exact, coexact;
};

struct LefschetzSplit {
  Form prim, zeta;
};

// omega = i sum_{a,b} h(a, b) phi^a ^ conj(phi)^b with h Hermitian positive definite.
class HermitianMetric {
 public:
  HermitianMetric(const InvariantModel& m, const MatC& h);
  static HermitianMetric from_omega(const InvariantModel& m, const Form& omega);

  const InvariantModel& model() const { return model_; }
  int n() const { return model_.n(); }
  const MatC& h() const { return h_; }
  const Form& omega() const { return omega_; }
  const Form& volume() const { return volume_; }  // omega^n / n!

  const GramSpace& gram(Bideg b) const;
  MatC gram_total(int k) const;
  cd inner(const Form& a, const Form& b) const;  // <a, b>, linear in a
  double norm(const Form& a) const;
  cd integral(const Form& top) const;  // normalized so that the volume integrates to 1

  // Hodge star: Lambda^{p,q} -> Lambda^{n-q,n-p}, a ^ *conj(b) = <a,b> dV.
  const MatC& star_matrix(Bideg b) const;
  Form star(const Form& a) const;

  // Adjoint of the operator acting on bidegree b, as a matrix back onto b.
  MatC adjoint(OperatorTag::Kind k, Bideg b) const;
  // Same adjoint through the star identities.
  MatC adjoint_star(OperatorTag::Kind k, Bideg b) const;

  MatC laplacian(LaplacianFlavor f, Bideg b) const;
  MatC harmonic_basis(LaplacianFlavor f, Bideg b) const;
  // Kernel intersection characterization of the harmonic space.
  MatC triple_kernel(LaplacianFlavor f, Bideg b) const;
  ThreeSpace three_space(LaplacianFlavor f, const Form& a) const;

  bool is_primitive(const Form& a, double tol = 1e-9) const;
  // Star test for (n-1,1)-forms: *a = i^{n^2+2n-2} a.
  bool is_primitive_star(const Form& a, double tol = 1e-9) const;
  LefschetzSplit lefschetz_split(const Form& a) const;

 private:
  MatC op(OperatorTag::Kind k, Bideg from) const;  // del, delbar, deldelbar
  Bideg shift(OperatorTag::Kind k, Bideg b) const;

  InvariantModel model_;
  MatC h_;
  Form omega_, volume_;
  cd mu_;
  std::map<Bideg, GramSpace> gram_;
  std::map<Bideg, MatC> star_;
};

// Matrix coefficients (n x n) of a (1,1)-form in the phi^a ^ conj(phi)^b basis.
MatC one_one_matrix(const Form& a);
Form form_from_one_one(int n, const MatC& c);

}  // namespace nh
