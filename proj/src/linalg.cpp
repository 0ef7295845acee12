#include "nilhodge/linalg.hpp"

#include <algorithm>

namespace nh {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::JacobiViolation: return "JacobiViolation";
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::NotAlmostComplex: return "NotAlmostComplex";
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::ZeroH: return "ZeroH";
    case ErrorKind::NoCanonicalMap: return "NoCanonicalMap";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::LemmaRequired: return "LemmaRequired";
    case ErrorKind::InconsistentSystem: return "InconsistentSystem";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotReal: return "NotReal";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NoTrivializer: return "NoTrivializer";
    case ErrorKind::NotInSubspace: return "NotInSubspace";
    case ErrorKind::MCObstructed: return "MCObstructed";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DimensionOdd: return "DimensionOdd";
    case ErrorKind::RaggedConstants: return "RaggedConstants";
  }
  return "Unknown";
}

namespace {

template <class Mat>
int count_rank(const typename Eigen::JacobiSVD<Mat>::SingularValuesType& s) {
  if (s.size() == 0) return 0;
  const double thr = std::max(kRelTol * s(0), kAbsTol);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thr) ++r;
  return r;
}

}  // namespace

int rank(const MatC& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(a);
  return count_rank<MatC>(svd.singularValues());
}

MatC kernel(const MatC& a) {
  const auto c = a.cols();
  if (c == 0) return MatC(0, 0);
  if (a.rows() == 0) return MatC::Identity(c, c);
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeFullV);
  const int r = count_rank<MatC>(svd.singularValues());
  return svd.matrixV().rightCols(c - r);
}

MatC image(const MatC& a) {
  if (a.rows() == 0 || a.cols() == 0) return MatC(a.rows(), 0);
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeFullU);
  const int r = count_rank<MatC>(svd.singularValues());
  return svd.matrixU().leftCols(r);
}

MatC intersect(const MatC& u, const MatC& v) {
  if (u.cols() == 0 || v.cols() == 0) return MatC(u.rows(), 0);
  MatC uv(u.rows(), u.cols() + v.cols());
  uv << u, -v;
  const MatC k = kernel(uv);
  if (k.cols() == 0) return MatC(u.rows(), 0);
  return image(u * k.topRows(u.cols()));
}

MatC sum_space(const MatC& u, const MatC& v) {
  MatC uv(u.rows(), u.cols() + v.cols());
  uv << u, v;
  return image(uv);
}

VecC pinv_solve(const MatC& a, const VecC& b) {
  if (a.cols() == 0) return VecC(0);
  if (a.rows() == 0) return VecC::Zero(a.cols());
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int r = count_rank<MatC>(svd.singularValues());
  VecC ub = svd.matrixU().leftCols(r).adjoint() * b;
  for (int i = 0; i < r; ++i) ub(i) /= svd.singularValues()(i);
  return svd.matrixV().leftCols(r) * ub;
}

MatC pinv(const MatC& a) {
  if (a.rows() == 0 || a.cols() == 0) return MatC::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int r = count_rank<MatC>(svd.singularValues());
  MatC sinv = MatC::Zero(r, r);
  for (int i = 0; i < r; ++i) sinv(i, i) = 1.0 / svd.singularValues()(i);
  return svd.matrixV().leftCols(r) * sinv * svd.matrixU().leftCols(r).adjoint();
}

double dist_to_span(const MatC& q, const VecC& x) {
  if (q.cols() == 0) return x.norm();
  return (x - q * (q.adjoint() * x)).norm();
}

MatC rref(const MatC& a_in, double tol) {
  MatC a = a_in;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index piv = row;
    double best = 0;
    for (Eigen::Index r = row; r < a.rows(); ++r)
      if (std::abs(a(r, col)) > best) { best = std::abs(a(r, col)); piv = r; }
    if (best <= tol) {
      for (Eigen::Index r = row; r < a.rows(); ++r) a(r, col) = 0;
      continue;
    }
    a.row(row).swap(a.row(piv));
    a.row(row) /= a(row, col);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (r != row) a.row(r) -= a(r, col) * a.row(row);
    ++row;
  }
  return a;
}

GramSpace::GramSpace(const MatC& g) : g_(0.5 * (g + g.adjoint())) {
  if (g_.rows() == 0) {
    r_ = rinv_ = MatC(0, 0);
    return;
  }
  Eigen::LLT<MatC> llt(g_);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::NotPositive, "Gram matrix is not positive definite");
  r_ = llt.matrixL().adjoint();
  rinv_ = r_.triangularView<Eigen::Upper>().solve(MatC::Identity(g_.rows(), g_.rows()));
}

MatC GramSpace::orth_basis(const MatC& a) const {
  if (a.cols() == 0 || dim() == 0) return MatC(dim(), 0);
  return rinv_ * image(r_ * a);
}

MatC GramSpace::project(const MatC& basis, const MatC& x) const {
  if (basis.cols() == 0) return MatC::Zero(x.rows(), x.cols());
  return basis * (basis.adjoint() * (g_ * x));
}

MatC GramSpace::complement_in(const MatC& big, const MatC& small) const {
  const MatC yb = image(r_ * big);
  const MatC ys = image(r_ * small);
  MatC rest = yb;
  if (ys.cols() > 0) rest = yb - ys * (ys.adjoint() * yb);
  if (rest.cols() == 0) return MatC(dim(), 0);
  return rinv_ * image(rest);
}

VecC GramSpace::min_norm_solve(const MatC& a, const VecC& b) const {
  if (dim() == 0) return VecC(0);
  return rinv_ * pinv_solve(a * rinv_, b);
}

MatC GramSpace::adjoint_to(const MatC& op, const GramSpace& target) const {
  // <op x, y>_target = <x, op* y>_this  =>  op* = g^{-1} op^H g_target
  if (dim() == 0 || target.dim() == 0) return MatC::Zero(dim(), target.dim());
  MatC rhs = op.adjoint() * target.gram();
  return rinv_ * (rinv_.adjoint() * rhs);
}

MatC GramSpace::canonical_basis(const MatC& a) const {
  const MatC q = image(a);
  if (q.cols() == 0) return MatC(dim(), 0);
  const MatC e = rref(q.transpose()).topRows(q.cols()).transpose();
  MatC out(dim(), e.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    VecC v = e.col(j);
    for (Eigen::Index i = 0; i < j; ++i) v -= inner(v, out.col(i)) * out.col(i);
    out.col(j) = v / norm(v);
  }
  return out;
}

MatR realify(const MatC& a) {
  const auto m = a.rows(), n = a.cols();
  MatR r(2 * m, 2 * n);
  r << a.real(), -a.imag(), a.imag(), a.real();
  return r;
}

MatR conj_realify(const MatC& a) {
  const auto m = a.rows(), n = a.cols();
  MatR r(2 * m, 2 * n);
  r << a.real(), a.imag(), a.imag(), -a.real();
  return r;
}

VecR to_real(const VecC& x) {
  VecR r(2 * x.size());
  r << x.real(), x.imag();
  return r;
}

VecC from_real(const VecR& x) {
  const auto n = x.size() / 2;
  VecC c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = cd(x(i), x(n + i));
  return c;
}

int rank_real(const MatR& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<MatR> svd(a);
  return count_rank<MatR>(svd.singularValues());
}

MatR kernel_real(const MatR& a) {
  const auto c = a.cols();
  if (c == 0) return MatR(0, 0);
  if (a.rows() == 0) return MatR::Identity(c, c);
  Eigen::JacobiSVD<MatR> svd(a, Eigen::ComputeFullV);
  const int r = count_rank<MatR>(svd.singularValues());
  return svd.matrixV().rightCols(c - r);
}

VecR pinv_solve_real(const MatR& a, const VecR& b) {
  if (a.cols() == 0) return VecR(0);
  if (a.rows() == 0) return VecR::Zero(a.cols());
  Eigen::JacobiSVD<MatR> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int r = count_rank<MatR>(svd.singularValues());
  VecR ub = svd.matrixU().leftCols(r).transpose() * b;
  for (int i = 0; i < r; ++i) ub(i) /= svd.singularValues()(i);
  return svd.matrixV().leftCols(r) * ub;
}

}  // namespace nh
