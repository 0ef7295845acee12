#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace nh {

using cd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;

enum class ErrorKind {
  JacobiViolation,
  NonIntegrable,
  NotAlmostComplex,
  DegreeOverflow,
  DegreeMismatch,
  ZeroH,
  NoCanonicalMap,
  HypothesisFailed,
  LemmaRequired,
  InconsistentSystem,
  NotPositive,
  NotReal,
  NoConvergence,
  NoTrivializer,
  NotInSubspace,
  MCObstructed,
  SchemaError,
  DimensionOdd,
  RaggedConstants,
};

const char* error_name(ErrorKind k);

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& msg)
      : std::runtime_error(std::string(error_name(k)) + ": " + msg), kind(k) {}
};

// Singular values below kRelTol * sigma_max count as zero.  The absolute
// floor keeps matrices that are pure roundoff from acquiring rank.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

int rank(const MatC& a);

// Orthonormal (Euclidean) bases.
MatC kernel(const MatC& a);
MatC image(const MatC& a);
MatC intersect(const MatC& u, const MatC& v);
MatC sum_space(const MatC& u, const MatC& v);

// Minimum-norm least-squares solution through the truncated SVD.
VecC pinv_solve(const MatC& a, const VecC& b);
MatC pinv(const MatC& a);

// Distance from x to the column span of an orthonormal basis q.
double dist_to_span(const MatC& q, const VecC& x);

// Reduced row echelon form, pivot entries normalized to 1.
MatC rref(const MatC& a, double tol = 1e-10);

// Inner-product space with Hermitian positive definite Gram g, where
// <a,b> = b^H g a.  Bases returned are g-orthonormal.
class GramSpace {
 public:
  GramSpace() = default;
  explicit GramSpace(const MatC& g);
  int dim() const { return static_cast<int>(g_.rows()); }
  const MatC& gram() const { return g_; }
  cd inner(const VecC& a, const VecC& b) const { return b.dot(g_ * a); }
  double norm(const VecC& a) const { return std::sqrt(std::max(0.0, inner(a, a).real())); }
  MatC orth_basis(const MatC& a) const;
  MatC project(const MatC& basis, const MatC& x) const;  // basis g-orthonormal
  MatC complement_in(const MatC& big, const MatC& small) const;
  // min ||x||_g subject to a x = b in least squares sense
  VecC min_norm_solve(const MatC& a, const VecC& b) const;
  MatC adjoint_to(const MatC& op, const GramSpace& target) const;
  // Deterministic orthonormal basis of span(a): reduced echelon form of the
  // span, then Gram-Schmidt in column order.
  MatC canonical_basis(const MatC& a) const;
  const MatC& chol_upper() const { return r_; }

 private:
  MatC g_, r_, rinv_;
};

// Real-linear helpers: complex vectors are embedded as [Re; Im].
MatR realify(const MatC& a);            // complex-linear map as real matrix
MatR conj_realify(const MatC& a);       // x -> a conj(x) as real matrix
VecR to_real(const VecC& x);
VecC from_real(const VecR& x);
int rank_real(const MatR& a);
MatR kernel_real(const MatR& a);
VecR pinv_solve_real(const MatR& a, const VecR& b);

}  // namespace nh
