#include "nilhodge/hodge.hpp"

#include <cmath>

namespace nh {

const char* flavor_name(LaplacianFlavor f) {
  switch (f) {
    case LaplacianFlavor::Aeppli: return "Aeppli";
    case LaplacianFlavor::BottChern: return "BottChern";
    case LaplacianFlavor::Dolbeault: return "Dolbeault";
  }
  return "?";
}

MatC one_one_matrix(const Form& a) {
  const int n = a.n();
  const VecC v = a.component({1, 1});
  MatC c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) = v(i * n + j);
  return c;
}

Form form_from_one_one(int n, const MatC& c) {
  VecC v(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j) = c(i, j);
  return Form::block(n, {1, 1}, v);
}

namespace {

cd ipow(int k) {
  static const cd table[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  return table[((k % 4) + 4) % 4];
}

double factorial(int k) {
  double r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

HermitianMetric::HermitianMetric(const InvariantModel& m, const MatC& h) : model_(m), h_(h) {
  const int n = m.n();
  if (h.rows() != n || h.cols() != n) throw Error(ErrorKind::DegreeMismatch, "metric matrix must be n x n");
  if ((h - h.adjoint()).norm() > 1e-12 * std::max(1.0, h.norm()))
    throw Error(ErrorKind::NotReal, "metric matrix is not Hermitian");
  h_ = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> es(h_);
  if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw Error(ErrorKind::NotPositive, "metric matrix is not positive definite");

  // psi = A phi orthonormal with h^T = A^H A; phi = A^{-1} psi
  Eigen::LLT<MatC> llt(h_.transpose());
  const MatC A = MatC(llt.matrixL()).adjoint();
  const MatC Ainv = A.inverse();
  MatC L = MatC::Zero(2 * n, 2 * n);
  L.topLeftCorner(n, n) = Ainv;
  L.bottomRightCorner(n, n) = Ainv.conjugate();
  const auto& B = basis(n);
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      const Bideg b{p, q};
      const auto& ms = B.masks(b);
      MatC T = MatC::Zero(ms.size(), ms.size());
      for (size_t c = 0; c < ms.size(); ++c) {
        const AlgVec x = substitute_monomial(L, ms[c]);
        for (size_t r = 0; r < ms.size(); ++r) T(r, c) = x(ms[r]);
      }
      gram_.emplace(b, GramSpace(T.adjoint() * T));
    }

  omega_ = form_from_one_one(n, cd(0, 1) * h_);
  volume_ = (1.0 / factorial(n)) * power(omega_, n);
  mu_ = top_coefficient(volume_);

  // star on input bidegree (q,p): S = mu W^{-1} G_{p,q}^T K
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      const Bideg in{q, p}, pq{p, q}, out{n - p, n - q};
      const int dpq = B.dim(pq), dout = B.dim(out);
      MatC W = MatC::Zero(dpq, dout);
      for (int i = 0; i < dpq; ++i)
        for (int j = 0; j < dout; ++j) {
          const int s = wedge_sign(B.mask(pq, i), B.mask(out, j));
          W(i, j) = double(s);
        }
      const MatC K = conjugation_matrix(n, in);
      star_[in] = mu_ * W.fullPivLu().solve(gram_.at(pq).gram().transpose() * K);
    }
}

HermitianMetric HermitianMetric::from_omega(const InvariantModel& m, const Form& omega) {
  for (const auto& b : omega.degrees())
    if (!(b == Bideg{1, 1}) && omega.component(b).norm() > 1e-12)
      throw Error(ErrorKind::DegreeMismatch, "metric form must be of type (1,1)");
  if (!is_real(omega, 1e-10)) throw Error(ErrorKind::NotReal, "metric form is not real");
  return HermitianMetric(m, cd(0, -1) * one_one_matrix(omega));
}

const GramSpace& HermitianMetric::gram(Bideg b) const {
  static const GramSpace empty;
  auto it = gram_.find(b);
  return it == gram_.end() ? empty : it->second;
}

MatC HermitianMetric::gram_total(int k) const {
  const auto& B = basis(n());
  MatC g = MatC::Zero(B.dim_total(k), B.dim_total(k));
  for (const auto& b : B.bidegrees(k)) g.block(B.offset(b), B.offset(b), B.dim(b), B.dim(b)) = gram(b).gram();
  return g;
}

cd HermitianMetric::inner(const Form& a, const Form& b) const {
  cd s = 0;
  for (const auto& [bd, v] : a.blocks())
    if (b.has(bd)) s += gram(bd).inner(v, b.component(bd));
  return s;
}

double HermitianMetric::norm(const Form& a) const { return std::sqrt(std::max(0.0, inner(a, a).real())); }

cd HermitianMetric::integral(const Form& top) const { return top_coefficient(top) / mu_; }

const MatC& HermitianMetric::star_matrix(Bideg b) const { return star_.at(b); }

Form HermitianMetric::star(const Form& a) const {
  const int n = this->n();
  Form out(n);
  for (const auto& [b, v] : a.blocks()) out.add({n - b.q, n - b.p}, star_.at(b) * v);
  return out;
}

Bideg HermitianMetric::shift(OperatorTag::Kind k, Bideg b) const {
  switch (k) {
    case OperatorTag::del: return {b.p + 1, b.q};
    case OperatorTag::delbar: return {b.p, b.q + 1};
    case OperatorTag::deldelbar: return {b.p + 1, b.q + 1};
    default: throw Error(ErrorKind::DegreeMismatch, "adjoints are provided for del, delbar, deldelbar");
  }
}

MatC HermitianMetric::op(OperatorTag::Kind k, Bideg from) const {
  return model_.block({k}, from, shift(k, from));
}

MatC HermitianMetric::adjoint(OperatorTag::Kind k, Bideg b) const {
  const auto& B = basis(n());
  const Bideg t = shift(k, b);
  if (B.dim(b) == 0 || B.dim(t) == 0) return MatC::Zero(B.dim(b), B.dim(t));
  return gram(b).adjoint_to(op(k, b), gram(t));
}

MatC HermitianMetric::adjoint_star(OperatorTag::Kind k, Bideg b) const {
  const int n = this->n();
  const auto& B = basis(n);
  const Bideg t = shift(k, b);
  if (B.dim(b) == 0 || B.dim(t) == 0) return MatC::Zero(B.dim(b), B.dim(t));
  const Bideg st{n - t.q, n - t.p};  // bidegree of *t
  switch (k) {
    case OperatorTag::del: {
      // del^* = - * delbar *
      const Bideg mid{st.p, st.q + 1};
      return -star_matrix(mid) * model_.delbar(st) * star_matrix(t);
    }
    case OperatorTag::delbar: {
      // delbar^* = - * del *
      const Bideg mid{st.p + 1, st.q};
      return -star_matrix(mid) * model_.del(st) * star_matrix(t);
    }
    case OperatorTag::deldelbar: {
      // (del delbar)^* = (-1)^{k+1} * del delbar * on forms landing in degree k
      const Bideg mid{st.p + 1, st.q + 1};
      const double sgn = (b.k() % 2) ? 1.0 : -1.0;
      return sgn * star_matrix(mid) * model_.block({OperatorTag::deldelbar}, st, mid) * star_matrix(t);
    }
    default: break;
  }
  throw Error(ErrorKind::DegreeMismatch, "adjoints are provided for del, delbar, deldelbar");
}

MatC HermitianMetric::laplacian(LaplacianFlavor f, Bideg b) const {
  using K = OperatorTag;
  const int p = b.p, q = b.q;
  auto D = [&](Bideg from) { return op(K::del, from); };
  auto Db = [&](Bideg from) { return op(K::delbar, from); };
  // adjoints landing in `to`
  auto Ds = [&](Bideg to) { return adjoint(K::del, to); };
  auto Dbs = [&](Bideg to) { return adjoint(K::delbar, to); };
  switch (f) {
    case LaplacianFlavor::Aeppli:
      return D({p - 1, q}) * Ds({p - 1, q}) + Db({p, q - 1}) * Dbs({p, q - 1}) +
             Dbs(b) * Ds({p, q + 1}) * D({p, q + 1}) * Db(b) +
             D({p - 1, q}) * Db({p - 1, q - 1}) * Dbs({p - 1, q - 1}) * Ds({p - 1, q}) +
             D({p - 1, q}) * Dbs({p - 1, q}) * Db({p - 1, q}) * Ds({p - 1, q}) +
             Db({p, q - 1}) * Ds({p, q - 1}) * D({p, q - 1}) * Dbs({p, q - 1});
    case LaplacianFlavor::BottChern:
      return Ds(b) * D(b) + Dbs(b) * Db(b) +
             D({p - 1, q}) * Db({p - 1, q - 1}) * Dbs({p - 1, q - 1}) * Ds({p - 1, q}) +
             Dbs(b) * Ds({p, q + 1}) * D({p, q + 1}) * Db(b) +
             Dbs(b) * D({p - 1, q + 1}) * Ds({p - 1, q + 1}) * Db(b) +
             Ds(b) * Db({p + 1, q - 1}) * Dbs({p + 1, q - 1}) * D(b);
    case LaplacianFlavor::Dolbeault:
      return Db({p, q - 1}) * Dbs({p, q - 1}) + Dbs(b) * Db(b);
  }
  return MatC();
}

MatC HermitianMetric::harmonic_basis(LaplacianFlavor f, Bideg b) const {
  return gram(b).canonical_basis(kernel(laplacian(f, b)));
}

MatC HermitianMetric::triple_kernel(LaplacianFlavor f, Bideg b) const {
  using K = OperatorTag;
  const int p = b.p, q = b.q;
  std::vector<MatC> parts;
  switch (f) {
    case LaplacianFlavor::Aeppli:
      parts = {adjoint(K::del, {p - 1, q}), adjoint(K::delbar, {p, q - 1}), op(K::deldelbar, b)};
      break;
    case LaplacianFlavor::BottChern:
      parts = {op(K::del, b), op(K::delbar, b), adjoint(K::deldelbar, {p - 1, q - 1})};
      break;
    case LaplacianFlavor::Dolbeault:
      parts = {op(K::delbar, b), adjoint(K::delbar, {p, q - 1})};
      break;
  }
  Eigen::Index rows = 0;
  for (const auto& m : parts) rows += m.rows();
  MatC s(rows, basis(n()).dim(b));
  Eigen::Index r = 0;
  for (const auto& m : parts) {
    s.middleRows(r, m.rows()) = m;
    r += m.rows();
  }
  return gram(b).canonical_basis(kernel(s));
}

ThreeSpace HermitianMetric::three_space(LaplacianFlavor f, const Form& a) const {
  using K = OperatorTag;
  const Bideg b = a.bideg();
  const int p = b.p, q = b.q;
  const GramSpace& g = gram(b);
  auto hcat = [](const MatC& x, const MatC& y) {
    MatC r(x.rows(), x.cols() + y.cols());
    r << x, y;
    return r;
  };
  MatC E, C;
  switch (f) {
    case LaplacianFlavor::Aeppli:
      E = hcat(op(K::del, {p - 1, q}), op(K::delbar, {p, q - 1}));
      C = adjoint(K::deldelbar, b);
      break;
    case LaplacianFlavor::BottChern:
      E = op(K::deldelbar, {p - 1, q - 1});
      C = hcat(adjoint(K::del, b), adjoint(K::delbar, b));
      break;
    case LaplacianFlavor::Dolbeault:
      E = op(K::delbar, {p, q - 1});
      C = adjoint(K::delbar, b);
      break;
  }
  const VecC v = a.component(b);
  const MatC H = harmonic_basis(f, b);
  ThreeSpace out;
  out.harmonic = Form::block(n(), b, g.project(H, v));
  out.exact = Form::block(n(), b, g.project(g.orth_basis(E), v));
  out.coexact = Form::block(n(), b, g.project(g.orth_basis(C), v));
  return out;
}

bool HermitianMetric::is_primitive(const Form& a, double tol) const {
  const int n = this->n();
  const Bideg b = a.bideg();
  const int k = b.k();
  const double scale = std::max(1.0, a.norm());
  if (k > n) return a.norm() <= tol * scale;
  // forms of degree 0 and 1 are primitive; omega^{n-k+1} ^ a leaves the algebra
  if (k < 2) return true;
  const Form w = wedge(power(omega_, n - k + 1), a);
  return w.norm() <= tol * scale;
}

bool HermitianMetric::is_primitive_star(const Form& a, double tol) const {
  const int n = this->n();
  if (!(a.bideg() == Bideg{n - 1, 1})) throw Error(ErrorKind::DegreeMismatch, "star test applies to (n-1,1)-forms");
  const Form d = star(a) - ipow(n * n + 2 * n - 2) * a;
  return d.norm() <= tol * std::max(1.0, a.norm());
}

LefschetzSplit HermitianMetric::lefschetz_split(const Form& a) const {
  const int n = this->n();
  if (!a.pure() || !(a.bideg() == Bideg{n - 1, 1}))
    throw Error(ErrorKind::DegreeMismatch, "Lefschetz split expects an (n-1,1)-form");
  // omega^2 ^ zeta = omega ^ a determines zeta in Lambda^{n-2,0}
  const MatC L2 = wedge_matrix(power(omega_, 2), {n - 2, 0});
  const VecC rhs = wedge(omega_, a).component({n, 2});
  const VecC z = pinv_solve(L2, rhs);
  LefschetzSplit s;
  s.zeta = Form::block(n, {n - 2, 0}, z);
  s.prim = a - wedge(omega_, s.zeta);
  return s;
}

}  // namespace nh
