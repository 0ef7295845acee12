#include "nilhodge/model.hpp"

#include <bit>
#include <cmath>
#include <gmpxx.h>

namespace nh {

std::vector<MatR> dense_constants(const LieAlgebraPresentation& p) {
  const int m = p.dim_real;
  std::vector<MatR> c(m, MatR::Zero(m, m));
  for (const auto& s : p.constants) {
    if (s.k < 0 || s.k >= m || s.i < 0 || s.i >= m || s.j < 0 || s.j >= m)
      throw Error(ErrorKind::SchemaError, "structure constant index out of range");
    if (s.i == s.j) {
      if (s.value != 0.0) throw Error(ErrorKind::SchemaError, "structure constants must be antisymmetric");
      continue;
    }
    c[s.k](s.i, s.j) += s.value;
    c[s.k](s.j, s.i) -= s.value;
  }
  return c;
}

int OperatorTag::degree() const {
  switch (kind) {
    case theta: return 0;
    case deldelbar:
    case dh_dminusinvh: return 2;
    default: return 1;
  }
}

std::string OperatorTag::name() const {
  switch (kind) {
    case d: return "d";
    case del: return "del";
    case delbar: return "delbar";
    case d_h: return "d_h";
    case d_minus_inv_h: return "d_minus_inv_h";
    case deldelbar: return "deldelbar";
    case dh_dminusinvh: return "dh_dminusinvh";
    case theta: return "theta";
  }
  return "?";
}

AlgVec alg_d(const std::vector<AlgVec>& dgen, const AlgVec& x) {
  AlgVec r = AlgVec::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) == 0.0) continue;
    const Mask m = Mask(i);
    int pos = 0;
    for (Mask mm = m; mm; mm &= mm - 1, ++pos) {
      const int g = std::countr_zero(mm);
      const Mask rest = m ^ (Mask(1) << g);
      // d(a ^ theta^g ^ b) picks (-1)^{deg a}; dtheta^g is even and commutes into front
      const double s0 = (pos & 1) ? -1.0 : 1.0;
      const AlgVec& dg = dgen[g];
      for (Eigen::Index k = 0; k < dg.size(); ++k) {
        if (dg(k) == 0.0) continue;
        const int s = wedge_sign(Mask(k), rest);
        if (s) r(Mask(k) | rest) += s0 * double(s) * dg(k) * x(i);
      }
    }
  }
  return r;
}

namespace {

std::vector<AlgVec> real_dgen(const LieAlgebraPresentation& p) {
  const int m = p.dim_real;
  const auto c = dense_constants(p);
  std::vector<AlgVec> out(m, AlgVec::Zero(Eigen::Index(1) << m));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (c[k](i, j) != 0.0) out[k]((Mask(1) << i) | (Mask(1) << j)) += c[k](i, j);
  return out;
}

MatC coframe_from_J(const MatR& J, int n) {
  const int m = 2 * n;
  if (J.rows() != m || J.cols() != m)
    throw Error(ErrorKind::NotAlmostComplex, "complex structure has the wrong shape");
  if ((J * J + MatR::Identity(m, m)).norm() > 1e-10)
    throw Error(ErrorKind::NotAlmostComplex, "J^2 differs from -Id");
  // (1,0)-forms a satisfy a(J X) = i a(X), i.e. J^T a = i a
  MatC A = J.transpose().cast<cd>() - cd(0, 1) * MatC::Identity(m, m);
  MatC k = kernel(A);
  if (k.cols() != n) throw Error(ErrorKind::NotAlmostComplex, "eigenspace of J has the wrong dimension");
  MatC r = rref(k.transpose());
  return r.topRows(n);
}

}  // namespace

double jacobi_residual(const LieAlgebraPresentation& pres) {
  const auto dg = real_dgen(pres);
  double worst = 0;
  for (const auto& x : dg) worst = std::max(worst, alg_d(dg, x).cwiseAbs().maxCoeff());
  return worst;
}

bool jacobi_exact(const LieAlgebraPresentation& pres) {
  const int m = pres.dim_real;
  const auto c = dense_constants(pres);
  for (int k = 0; k < m; ++k) {
    std::map<Mask, mpq_class> acc;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        if (c[k](i, j) == 0.0) continue;
        const mpq_class ckij(c[k](i, j));
        // d(e^i ^ e^j) = de^i ^ e^j - e^i ^ de^j
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b) {
            const Mask ab = (Mask(1) << a) | (Mask(1) << b);
            if (c[i](a, b) != 0.0) {
              const int s = wedge_sign(ab, Mask(1) << j);
              if (s) acc[ab | (Mask(1) << j)] += ckij * mpq_class(c[i](a, b)) * s;
            }
            if (c[j](a, b) != 0.0) {
              const int s = wedge_sign(Mask(1) << i, ab);
              if (s) acc[ab | (Mask(1) << i)] -= ckij * mpq_class(c[j](a, b)) * s;
            }
          }
      }
    for (const auto& [mask, v] : acc)
      if (v != 0) return false;
  }
  return true;
}

InvariantModel build_model(const LieAlgebraPresentation& pres) {
  if (pres.dim_real <= 0 || pres.dim_real % 2)
    throw Error(ErrorKind::DimensionOdd, "real dimension must be a positive even integer");
  const int n = pres.dim_real / 2;
  if (n > 4) throw Error(ErrorKind::DegreeOverflow, "complex dimension above 4 is not supported");
  if (jacobi_residual(pres) > 1e-10) throw Error(ErrorKind::JacobiViolation, "d^2 != 0 on degree-1 covectors");

  InvariantModel mdl;
  mdl.n_ = n;
  mdl.pres_ = pres;
  if (pres.coframe) {
    mdl.P_ = *pres.coframe;
    if (mdl.P_.rows() != n || mdl.P_.cols() != 2 * n)
      throw Error(ErrorKind::NotAlmostComplex, "coframe must be n x 2n");
  } else if (pres.J) {
    mdl.P_ = coframe_from_J(*pres.J, n);
  } else {
    throw Error(ErrorKind::NotAlmostComplex, "no complex structure given");
  }
  MatC M(2 * n, 2 * n);
  M << mdl.P_, mdl.P_.conjugate();
  Eigen::JacobiSVD<MatC> svd(M);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-10 * s(0))
    throw Error(ErrorKind::NotAlmostComplex, "coframe and its conjugate do not span the complexified dual");
  mdl.Q_ = M.inverse();

  // dtheta^g = sum_i M(g, i) de^i, rewritten through e^j = sum_b Q(j, b) theta^b
  const auto dr = real_dgen(pres);
  const Eigen::Index size = Eigen::Index(1) << (2 * n);
  mdl.dgen_.assign(2 * n, AlgVec::Zero(size));
  for (int g = 0; g < 2 * n; ++g) {
    AlgVec x = AlgVec::Zero(size);
    for (int i = 0; i < 2 * n; ++i) x += M(g, i) * dr[i];
    mdl.dgen_[g] = substitute(mdl.Q_, x);
  }
  double scale = 1.0;
  for (const auto& x : mdl.dgen_) scale = std::max(scale, x.cwiseAbs().maxCoeff());
  const Mask low = (Mask(1) << n) - 1;
  for (int a = 0; a < n; ++a)
    for (Eigen::Index k = 0; k < size; ++k)
      if (std::popcount(Mask(k) & ~low) == 2 && std::abs(mdl.dgen_[a](k)) > 1e-10 * scale)
        throw Error(ErrorKind::NonIntegrable, "d of a (1,0)-form has a (0,2)-component");
  for (auto& x : mdl.dgen_)
    for (Eigen::Index k = 0; k < size; ++k)
      if (std::abs(x(k)) <= 1e-14 * scale) x(k) = 0.0;

  const auto& B = basis(n);
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      const Bideg b{p, q};
      const Bideg tp{p + 1, q}, tq{p, q + 1};
      MatC dp = MatC::Zero(B.dim(tp), B.dim(b));
      MatC dq = MatC::Zero(B.dim(tq), B.dim(b));
      const auto& ms = B.masks(b);
      for (size_t c = 0; c < ms.size(); ++c) {
        AlgVec e = AlgVec::Zero(size);
        e(ms[c]) = 1.0;
        const AlgVec de = alg_d(mdl.dgen_, e);
        for (Eigen::Index k = 0; k < size; ++k) {
          if (de(k) == 0.0) continue;
          const auto [bb, idx] = B.locate(Mask(k));
          if (bb == tp) dp(idx, c) += de(k);
          else if (bb == tq) dq(idx, c) += de(k);
        }
      }
      mdl.del_[b] = dp;
      mdl.delbar_[b] = dq;
    }
  return mdl;
}

MatC InvariantModel::block(const OperatorTag& t, Bideg b, Bideg target) const {
  const auto& B = basis(n_);
  const Bideg up{b.p + 1, b.q}, right{b.p, b.q + 1};
  MatC z = MatC::Zero(B.dim(target), B.dim(b));
  if (z.size() == 0) return z;
  const bool needs_h = t.kind == OperatorTag::d_h || t.kind == OperatorTag::d_minus_inv_h ||
                       t.kind == OperatorTag::dh_dminusinvh || t.kind == OperatorTag::theta;
  if (needs_h && t.h == 0.0) throw Error(ErrorKind::ZeroH, "operator parameter h must be nonzero");
  auto first = [&](double a, double c) -> MatC {
    if (target == up) return a * del_.at(b);
    if (target == right) return c * delbar_.at(b);
    return z;
  };
  switch (t.kind) {
    case OperatorTag::d: return first(1, 1);
    case OperatorTag::del: return first(1, 0);
    case OperatorTag::delbar: return first(0, 1);
    case OperatorTag::d_h: return first(t.h, 1);
    case OperatorTag::d_minus_inv_h: return first(-1.0 / t.h, 1);
    case OperatorTag::deldelbar:
      if (target == Bideg{b.p + 1, b.q + 1}) return del_.at(right) * delbar_.at(b);
      return z;
    case OperatorTag::dh_dminusinvh: {
      const OperatorTag outer{OperatorTag::d_h, t.h}, inner{OperatorTag::d_minus_inv_h, t.h};
      for (const Bideg mid : {up, right}) {
        if (B.dim(mid) == 0) continue;
        z += block(outer, mid, target) * block(inner, b, mid);
      }
      return z;
    }
    case OperatorTag::theta:
      if (target == b) return std::pow(t.h, b.p) * MatC::Identity(z.rows(), z.cols());
      return z;
  }
  return z;
}

MatC InvariantModel::total(const OperatorTag& t, int k) const {
  const auto& B = basis(n_);
  const int kt = k + t.degree();
  MatC m = MatC::Zero(B.dim_total(kt), B.dim_total(k));
  for (const auto& b : B.bidegrees(k))
    for (const auto& c : B.bidegrees(kt)) {
      const MatC blk = block(t, b, c);
      if (blk.size()) m.block(B.offset(c), B.offset(b), B.dim(c), B.dim(b)) = blk;
    }
  return m;
}

namespace {

// Whether the operator has a component from b to c at all.
bool reaches(const OperatorTag& t, Bideg b, Bideg c) {
  const int dp = c.p - b.p, dq = c.q - b.q;
  switch (t.kind) {
    case OperatorTag::del: return dp == 1 && dq == 0;
    case OperatorTag::delbar: return dp == 0 && dq == 1;
    case OperatorTag::d:
    case OperatorTag::d_h:
    case OperatorTag::d_minus_inv_h: return dp + dq == 1 && dp >= 0 && dq >= 0;
    case OperatorTag::deldelbar:
    case OperatorTag::dh_dminusinvh: return dp == 1 && dq == 1;
    case OperatorTag::theta: return dp == 0 && dq == 0;
  }
  return false;
}

}  // namespace

Form InvariantModel::apply(const OperatorTag& t, const Form& a) const {
  const auto& B = basis(n_);
  Form out(n_);
  for (const auto& [b, v] : a.blocks()) {
    const int kt = b.k() + t.degree();
    for (const auto& c : B.bidegrees(kt)) {
      if (!reaches(t, b, c)) continue;
      const MatC blk = block(t, b, c);
      if (blk.rows() == 0) continue;
      out.add(c, blk * v);
    }
  }
  return out;
}

Form InvariantModel::real_monomial(const std::vector<int>& idx, double c) const {
  AlgVec e = AlgVec::Zero(Eigen::Index(1) << (2 * n_));
  AlgVec r = AlgVec::Zero(e.size());
  r(0) = c;
  for (int i : idx) {
    AlgVec g = AlgVec::Zero(e.size());
    for (int b = 0; b < 2 * n_; ++b) g(Mask(1) << b) = Q_(i, b);
    r = alg_wedge(r, g);
  }
  return from_alg(n_, r);
}

AlgVec InvariantModel::to_real_coframe(const Form& f) const {
  MatC M(2 * n_, 2 * n_);
  M << P_, P_.conjugate();
  return substitute(M, to_alg(f));
}

}  // namespace nh
