#include "nilhodge/exterior.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <memory>
#include <mutex>

namespace nh {

int popcount(Mask m) { return std::popcount(m); }

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (Mask bb = b; bb; bb &= bb - 1) {
    const int j = std::countr_zero(bb);
    // generators of a that sit after j must move past it
    swaps += std::popcount(a >> (j + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

int interior_sign(int g, Mask m, Mask& rest) {
  const Mask bit = Mask(1) << g;
  if (!(m & bit)) return 0;
  rest = m ^ bit;
  return (std::popcount(m & (bit - 1)) & 1) ? -1 : 1;
}

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

ExteriorBasis::ExteriorBasis(int n) : n_(n) {
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      std::vector<Mask> ms;
      for (const auto& I : combinations(n, p))
        for (const auto& J : combinations(n, q)) {
          Mask m = 0;
          for (int i : I) m |= Mask(1) << i;
          for (int j : J) m |= Mask(1) << (n + j);
          where_[m] = {Bideg{p, q}, static_cast<int>(ms.size())};
          ms.push_back(m);
        }
      masks_[Bideg{p, q}] = std::move(ms);
    }
}

int ExteriorBasis::dim(Bideg b) const {
  if (b.p < 0 || b.q < 0 || b.p > n_ || b.q > n_) return 0;
  return static_cast<int>(binom(n_, b.p) * binom(n_, b.q));
}

int ExteriorBasis::dim_total(int k) const {
  if (k < 0 || k > 2 * n_) return 0;
  return static_cast<int>(binom(2 * n_, k));
}

std::vector<Bideg> ExteriorBasis::bidegrees(int k) const {
  std::vector<Bideg> out;
  for (int p = std::max(0, k - n_); p <= std::min(k, n_); ++p) out.push_back({p, k - p});
  return out;
}

int ExteriorBasis::offset(Bideg b) const {
  int off = 0;
  for (const auto& c : bidegrees(b.k())) {
    if (c == b) return off;
    off += dim(c);
  }
  return off;
}

Bideg ExteriorBasis::bideg_of(Mask m) const {
  const Mask low = (Mask(1) << n_) - 1;
  return {std::popcount(m & low), std::popcount(m >> n_)};
}

const ExteriorBasis& basis(int n) {
  static std::array<std::unique_ptr<ExteriorBasis>, 9> cache;
  static std::mutex mu;
  if (n < 1 || n > 8) throw Error(ErrorKind::DegreeOverflow, "complex dimension out of range");
  std::lock_guard<std::mutex> lock(mu);
  if (!cache[n]) cache[n] = std::make_unique<ExteriorBasis>(n);
  return *cache[n];
}

// ---------------------------------------------------------------- Form

Form Form::zero(int n, Bideg b) { return block(n, b, VecC::Zero(basis(n).dim(b))); }

Form Form::block(int n, Bideg b, const VecC& v) {
  Form f(n);
  f.set(b, v);
  return f;
}

Form Form::monomial(int n, std::vector<int> I, std::vector<int> J, cd c) {
  // Sort each list while tracking the permutation sign; I precedes J.
  int sign = 1;
  auto sort_sign = [&](std::vector<int>& v) {
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = 0; j + 1 < v.size() - i; ++j)
        if (v[j] > v[j + 1]) { std::swap(v[j], v[j + 1]); sign = -sign; }
    for (size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] == v[i + 1]) sign = 0;
  };
  sort_sign(I);
  sort_sign(J);
  const Bideg b{static_cast<int>(I.size()), static_cast<int>(J.size())};
  Form f = zero(n, b);
  if (sign == 0) return f;
  Mask m = 0;
  for (int i : I) m |= Mask(1) << (i - 1);
  for (int j : J) m |= Mask(1) << (n + j - 1);
  VecC v = f.component(b);
  v(basis(n).locate(m).second) = c * double(sign);
  f.set(b, v);
  return f;
}

Form Form::scalar(int n, cd c) {
  VecC v(1);
  v(0) = c;
  return block(n, {0, 0}, v);
}

Form Form::from_total(int n, int k, const VecC& v) {
  const auto& B = basis(n);
  Form f(n);
  for (const auto& b : B.bidegrees(k)) f.set(b, v.segment(B.offset(b), B.dim(b)));
  return f;
}

VecC Form::component(Bideg b) const {
  auto it = blocks_.find(b);
  if (it != blocks_.end()) return it->second;
  return VecC::Zero(basis(n_).dim(b));
}

Form Form::part(Bideg b) const { return block(n_, b, component(b)); }

void Form::set(Bideg b, const VecC& v) {
  if (b.p < 0 || b.q < 0 || b.p > n_ || b.q > n_)
    throw Error(ErrorKind::DegreeOverflow, "bidegree outside the algebra");
  if (v.size() != basis(n_).dim(b))
    throw Error(ErrorKind::DegreeMismatch, "coefficient vector length does not match bidegree");
  blocks_[b] = v;
}

void Form::add(Bideg b, const VecC& v) {
  auto it = blocks_.find(b);
  if (it == blocks_.end()) set(b, v);
  else it->second += v;
}

std::vector<Bideg> Form::degrees() const {
  std::vector<Bideg> out;
  for (const auto& [b, v] : blocks_) out.push_back(b);
  return out;
}

Bideg Form::bideg() const {
  if (blocks_.size() != 1) throw Error(ErrorKind::DegreeMismatch, "form is not of pure type");
  return blocks_.begin()->first;
}

VecC Form::total(int k) const {
  const auto& B = basis(n_);
  VecC v = VecC::Zero(B.dim_total(k));
  for (const auto& b : B.bidegrees(k)) v.segment(B.offset(b), B.dim(b)) = component(b);
  return v;
}

double Form::norm() const {
  double s = 0;
  for (const auto& [b, v] : blocks_) s += v.squaredNorm();
  return std::sqrt(s);
}

Form& Form::operator+=(const Form& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [b, v] : o.blocks_) add(b, v);
  return *this;
}

Form& Form::operator-=(const Form& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [b, v] : o.blocks_) add(b, -v);
  return *this;
}

Form& Form::operator*=(cd s) {
  for (auto& [b, v] : blocks_) v *= s;
  return *this;
}

// ------------------------------------------------------------ products

Form wedge(const Form& a, const Form& b) {
  const int n = a.n() ? a.n() : b.n();
  const auto& B = basis(n);
  Form out(n);
  for (const auto& [ba, va] : a.blocks())
    for (const auto& [bb, vb] : b.blocks()) {
      const Bideg r{ba.p + bb.p, ba.q + bb.q};
      if (r.p > n || r.q > n) {
        if (ba.k() + bb.k() > 2 * n)
          throw Error(ErrorKind::DegreeOverflow, "wedge product exceeds top degree");
        continue;  // vanishes for type reasons
      }
      VecC vr = VecC::Zero(B.dim(r));
      const auto& ma = B.masks(ba);
      const auto& mb = B.masks(bb);
      for (size_t i = 0; i < ma.size(); ++i) {
        if (va(i) == 0.0) continue;
        for (size_t j = 0; j < mb.size(); ++j) {
          if (vb(j) == 0.0) continue;
          const int s = wedge_sign(ma[i], mb[j]);
          if (!s) continue;
          vr(B.locate(ma[i] | mb[j]).second) += double(s) * va(i) * vb(j);
        }
      }
      out.add(r, vr);
    }
  return out;
}

Form power(const Form& a, int k) {
  Form r = Form::scalar(a.n(), 1.0);
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

MatC conjugation_matrix(int n, Bideg b) {
  const auto& B = basis(n);
  const Bideg t{b.q, b.p};
  MatC c = MatC::Zero(B.dim(t), B.dim(b));
  const Mask low = (Mask(1) << n) - 1;
  const auto& ms = B.masks(b);
  for (size_t i = 0; i < ms.size(); ++i) {
    const Mask I = ms[i] & low, J = ms[i] >> n;
    // conj(phi^I ^ phibar^J) = phibar^I ^ phi^J = (-1)^{|I||J|} phi^J ^ phibar^I
    const int s = ((std::popcount(I) * std::popcount(J)) & 1) ? -1 : 1;
    c(B.locate(J | (I << n)).second, i) = double(s);
  }
  return c;
}

Form conjugate(const Form& a) {
  Form out(a.n());
  for (const auto& [b, v] : a.blocks())
    out.add({b.q, b.p}, conjugation_matrix(a.n(), b) * v.conjugate());
  return out;
}

bool is_real(const Form& a, double tol) { return (a - conjugate(a)).norm() <= tol * std::max(1.0, a.norm()); }

cd top_coefficient(const Form& a) {
  const int n = a.n();
  return a.component({n, n})(0);
}

MatC wedge_matrix(const Form& w, Bideg b) {
  const int n = w.n();
  const auto& B = basis(n);
  const int cols = B.dim(b);
  std::vector<Bideg> outs;
  for (const auto& [bw, v] : w.blocks()) outs.push_back({bw.p + b.p, bw.q + b.q});
  if (outs.empty()) return MatC(0, cols);
  const Bideg r = outs.front();
  for (const auto& o : outs)
    if (!(o == r)) throw Error(ErrorKind::DegreeMismatch, "wedge_matrix needs a pure-type multiplier");
  MatC m = MatC::Zero(B.dim(r), cols);
  for (int j = 0; j < cols; ++j) {
    VecC e = VecC::Zero(cols);
    e(j) = 1.0;
    m.col(j) = wedge(w, Form::block(n, b, e)).component(r);
  }
  return m;
}

// --------------------------------------------------------- contraction

namespace {

Form contract_generators(const VecC& coeffs, int gen_offset, const Form& a) {
  const int n = a.n();
  const auto& B = basis(n);
  Form out(n);
  for (const auto& [b, v] : a.blocks()) {
    const Bideg r = gen_offset == 0 ? Bideg{b.p - 1, b.q} : Bideg{b.p, b.q - 1};
    if (r.p < 0 || r.q < 0) continue;
    VecC vr = VecC::Zero(B.dim(r));
    const auto& ms = B.masks(b);
    for (size_t i = 0; i < ms.size(); ++i) {
      if (v(i) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (coeffs(j) == 0.0) continue;
        Mask rest = 0;
        const int s = interior_sign(gen_offset + j, ms[i], rest);
        if (!s) continue;
        vr(B.locate(rest).second) += double(s) * coeffs(j) * v(i);
      }
    }
    out.add(r, vr);
  }
  return out;
}

}  // namespace

Form contract(const VecC& zeta, const Form& a) { return contract_generators(zeta, 0, a); }
Form contract_bar(const VecC& xi, const Form& a) { return contract_generators(xi, a.n(), a); }

VectorValuedForm VectorValuedForm::zero(int n, int q) {
  return {n, q, MatC::Zero(basis(n).dim({0, q}), n)};
}

VectorValuedForm VectorValuedForm::from_vector(int n, int q, const VecC& flat) {
  VectorValuedForm v = zero(n, q);
  for (int r = 0; r < v.coeff.rows(); ++r)
    for (int j = 0; j < n; ++j) v.coeff(r, j) = flat(r * n + j);
  return v;
}

VecC VectorValuedForm::flat() const {
  VecC f(coeff.rows() * n);
  for (int r = 0; r < coeff.rows(); ++r)
    for (int j = 0; j < n; ++j) f(r * n + j) = coeff(r, j);
  return f;
}

Form contract(const VectorValuedForm& v, const Form& a) {
  const int n = a.n();
  const auto& B = basis(n);
  Form out(n);
  for (int r = 0; r < v.coeff.rows(); ++r) {
    const Mask mJ = B.mask({0, v.q}, r);
    VecC e = VecC::Zero(B.dim({0, v.q}));
    e(r) = 1.0;
    const Form barJ = Form::block(n, {0, v.q}, e);
    VecC col = v.coeff.row(r).transpose();
    if (col.isZero(0.0)) continue;
    (void)mJ;
    out += wedge(barJ, contract(col, a));
  }
  if (out.blocks().empty()) {
    for (const auto& b : a.degrees())
      if (b.p >= 1 && b.q + v.q <= n) out.add({b.p - 1, b.q + v.q}, VecC::Zero(B.dim({b.p - 1, b.q + v.q})));
  }
  return out;
}

MatC contraction_matrix(const Form& a, int q) {
  const int n = a.n();
  const auto& B = basis(n);
  const Bideg ab = a.bideg();
  const Bideg r{ab.p - 1, ab.q + q};
  const int cols = B.dim({0, q}) * n;
  MatC m = MatC::Zero(B.dim(r), cols);
  for (int c = 0; c < cols; ++c) {
    VecC e = VecC::Zero(cols);
    e(c) = 1.0;
    m.col(c) = contract(VectorValuedForm::from_vector(n, q, e), a).component(r);
  }
  return m;
}

// ------------------------------------------------------ full algebra

AlgVec alg_wedge(const AlgVec& a, const AlgVec& b) {
  AlgVec r = AlgVec::Zero(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) == 0.0) continue;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (b(j) == 0.0) continue;
      const int s = wedge_sign(Mask(i), Mask(j));
      if (s) r(Mask(i) | Mask(j)) += double(s) * a(i) * b(j);
    }
  }
  return r;
}

AlgVec substitute_monomial(const MatC& l, Mask m) {
  const int g = static_cast<int>(l.rows());
  const Eigen::Index size = Eigen::Index(1) << g;
  AlgVec r = AlgVec::Zero(size);
  r(0) = 1.0;
  for (int i = 0; i < g; ++i) {
    if (!(m & (Mask(1) << i))) continue;
    AlgVec img = AlgVec::Zero(size);
    for (int b = 0; b < g; ++b) img(Mask(1) << b) = l(i, b);
    r = alg_wedge(r, img);
  }
  return r;
}

AlgVec substitute(const MatC& l, const AlgVec& x) {
  AlgVec r = AlgVec::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0) r += x(i) * substitute_monomial(l, Mask(i));
  return r;
}

AlgVec to_alg(const Form& f) {
  const int n = f.n();
  const auto& B = basis(n);
  AlgVec r = AlgVec::Zero(Eigen::Index(1) << (2 * n));
  for (const auto& [b, v] : f.blocks()) {
    const auto& ms = B.masks(b);
    for (size_t i = 0; i < ms.size(); ++i) r(ms[i]) += v(i);
  }
  return r;
}

Form from_alg(int n, const AlgVec& x) {
  const auto& B = basis(n);
  Form f(n);
  std::map<Bideg, VecC> blocks;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) == 0.0) continue;
    const auto [b, idx] = B.locate(Mask(i));
    auto it = blocks.find(b);
    if (it == blocks.end()) it = blocks.emplace(b, VecC::Zero(B.dim(b))).first;
    it->second(idx) = x(i);
  }
  for (auto& [b, v] : blocks) f.set(b, v);
  return f;
}

}  // namespace nh
