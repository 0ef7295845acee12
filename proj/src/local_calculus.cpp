#include "nilhodge/local_calculus.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace nh::local {

GaussQ& GaussQ::operator+=(const GaussQ& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussQ& GaussQ::operator-=(const GaussQ& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussQ operator*(const GaussQ& a, const GaussQ& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

// ---------------------------------------------------------------- Poly

Poly Poly::constant(const GaussQ& c) { return monomial(Exponent{}, c); }

Poly Poly::monomial(const Exponent& e, const GaussQ& c) {
  Poly p;
  if (!c.is_zero()) p.terms_[e] = c;
  return p;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (auto x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

void Poly::clean() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

Poly Poly::diff(int k, bool bar, int n) const {
  const int slot = bar ? n + k : k;
  Poly r;
  for (const auto& [e, c] : terms_) {
    if (e[slot] == 0) continue;
    Exponent f = e;
    --f[slot];
    r.terms_[f] += c * GaussQ(long(e[slot]));
  }
  r.clean();
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [e, c] : o.terms_) terms_[e] += c;
  clean();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [e, c] : o.terms_) terms_[e] -= c;
  clean();
  return *this;
}

Poly& Poly::operator*=(const GaussQ& c) {
  for (auto& [e, v] : terms_) v = v * c;
  clean();
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e;
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.terms_[e] += ca * cb;
    }
  r.clean();
  return r;
}

std::string Poly::str(int n) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.re.get_str() << (c.im >= 0 ? "+" : "") << c.im.get_str() << "i)";
    for (int i = 0; i < 2 * n; ++i)
      if (e[i]) os << "*" << (i < n ? "z" : "zb") << (i % n + 1) << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
  }
  return os.str();
}

// ------------------------------------------------------------ PolyForm

void PolyForm::add(Mask m, const Poly& p) {
  if (p.is_zero()) return;
  auto it = coeff.find(m);
  if (it == coeff.end()) {
    coeff.emplace(m, p);
    return;
  }
  it->second += p;
  if (it->second.is_zero()) coeff.erase(it);
}

int PolyForm::max_degree() const {
  int d = 0;
  for (const auto& [m, p] : coeff) d = std::max(d, p.degree());
  return d;
}

std::string PolyForm::str() const {
  if (coeff.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, p] : coeff) {
    if (!first) os << " + ";
    first = false;
    os << "[" << p.str(n) << "]";
    for (int g = 0; g < 2 * n; ++g)
      if (m & (Mask(1) << g)) os << (g < n ? " dz" : " dzb") << (g % n + 1);
  }
  return os.str();
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
  if (n == 0) n = o.n;
  for (const auto& [m, p] : o.coeff) add(m, p);
  return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) {
  if (n == 0) n = o.n;
  for (const auto& [m, p] : o.coeff) add(m, Poly() - p);
  return *this;
}

namespace {

// Word of generator indices in increasing order.
std::vector<int> word(Mask m) {
  std::vector<int> w;
  for (int g = 0; g < 32; ++g)
    if (m & (Mask(1) << g)) w.push_back(g);
  return w;
}

// Sort a word by adjacent transpositions; 0 if a generator repeats.
int normalize(std::vector<int>& w, Mask& out) {
  int s = 1;
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t j = 0; j + 1 < w.size() - i; ++j)
      if (w[j] > w[j + 1]) {
        std::swap(w[j], w[j + 1]);
        s = -s;
      }
  out = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i + 1 < w.size() && w[i] == w[i + 1]) return 0;
    out |= Mask(1) << w[i];
  }
  return s;
}

// Prepend a single generator g to monomial m.
int prepend(int g, Mask m, Mask& out) {
  std::vector<int> w = word(m);
  w.insert(w.begin(), g);
  return normalize(w, out);
}

GaussQ sign(int s) { return GaussQ(long(s)); }

// d/dz_j -| monomial: walk the word dz_{i_1} .. dz_{i_p} dzbar_J and delete slot l with (-1)^{l-1}.
PolyForm contract_monomial(int n, int j, Mask m, const Poly& c) {
  PolyForm r = PolyForm::zero(n);
  const std::vector<int> w = word(m);
  for (size_t l = 0; l < w.size(); ++l) {
    if (w[l] >= n) break;  // only holomorphic slots pair with d/dz_j
    if (w[l] != j) continue;
    Poly t = c;
    t *= sign(l % 2 ? -1 : 1);
    r.add(m ^ (Mask(1) << j), t);
  }
  return r;
}

}  // namespace

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  PolyForm r = PolyForm::zero(a.n ? a.n : b.n);
  for (const auto& [ma, pa] : a.coeff)
    for (const auto& [mb, pb] : b.coeff) {
      std::vector<int> w = word(ma), wb = word(mb);
      w.insert(w.end(), wb.begin(), wb.end());
      Mask out = 0;
      const int s = normalize(w, out);
      if (!s) continue;
      Poly t = pa * pb;
      t *= sign(s);
      r.add(out, t);
    }
  return r;
}

PolyForm del(const PolyForm& a) {
  PolyForm r = PolyForm::zero(a.n);
  for (const auto& [m, p] : a.coeff)
    for (int k = 0; k < a.n; ++k) {
      Mask out = 0;
      const int s = prepend(k, m, out);
      if (!s) continue;
      Poly t = p.diff(k, false, a.n);
      t *= sign(s);
      r.add(out, t);
    }
  return r;
}

PolyForm delbar(const PolyForm& a) {
  PolyForm r = PolyForm::zero(a.n);
  for (const auto& [m, p] : a.coeff)
    for (int k = 0; k < a.n; ++k) {
      Mask out = 0;
      const int s = prepend(a.n + k, m, out);
      if (!s) continue;
      Poly t = p.diff(k, true, a.n);
      t *= sign(s);
      r.add(out, t);
    }
  return r;
}

PolyForm contract(const PolyVectorField& z, const PolyForm& a) {
  PolyForm r = PolyForm::zero(a.n);
  for (const auto& [m, p] : a.coeff)
    for (int j = 0; j < a.n; ++j) {
      if (z.comp[j].is_zero()) continue;
      r += contract_monomial(a.n, j, m, z.comp[j] * p);
    }
  return r;
}

PolyForm contract(const PolyVectorForm& v, const PolyForm& a) {
  PolyForm r = PolyForm::zero(a.n);
  for (const auto& [S, comps] : v.comp) {
    PolyForm barS = PolyForm::zero(a.n);
    barS.add(S, Poly::constant(GaussQ(1)));
    PolyVectorField z{a.n, comps};
    r += wedge(barS, contract(z, a));
  }
  return r;
}

PolyVectorForm PolyVectorForm::diagonal(int n, const std::vector<Poly>& v) {
  PolyVectorForm r{n, {}};
  for (int l = 0; l < n; ++l) {
    std::vector<Poly> c(n);
    c[l] = v[l];
    r.comp[Mask(1) << (n + l)] = c;
  }
  return r;
}

PolyVectorForm PolyVectorForm::from_field(const PolyVectorField& z) {
  PolyVectorForm r{z.n, {}};
  r.comp[0] = z.comp;
  return r;
}

PolyVectorForm delbar(const PolyVectorForm& v) {
  const int n = v.n;
  PolyVectorForm r{n, {}};
  for (const auto& [S, comps] : v.comp)
    for (int s = 0; s < n; ++s) {
      Mask out = 0;
      const int sg = prepend(n + s, S, out);
      if (!sg) continue;
      auto it = r.comp.find(out);
      if (it == r.comp.end()) it = r.comp.emplace(out, std::vector<Poly>(n)).first;
      for (int j = 0; j < n; ++j) {
        Poly t = comps[j].diff(s, true, n);
        t *= sign(sg);
        it->second[j] += t;
      }
    }
  return r;
}

PolyVectorForm delbar(const PolyVectorField& z) { return delbar(PolyVectorForm::from_field(z)); }

PolyForm chart_apply(ChartOp op, const PolyForm& a, const PolyVectorField* z, const PolyVectorForm* v) {
  if (a.n < 1 || a.n > 4) throw Error(ErrorKind::DegreeOverflow, "chart dimension must be at most 4");
  if (a.max_degree() > 4) throw Error(ErrorKind::DegreeOverflow, "polynomial degree above 4");
  switch (op) {
    case ChartOp::del: return del(a);
    case ChartOp::delbar: return delbar(a);
    case ChartOp::contract_field:
      if (!z) throw Error(ErrorKind::SchemaError, "missing vector field");
      return contract(*z, a);
    case ChartOp::contract_vector_form:
      if (!v) throw Error(ErrorKind::SchemaError, "missing vector-valued form");
      return contract(*v, a);
  }
  return a;
}

Poly random_poly(std::mt19937_64& rng, int n, int degree) {
  std::uniform_int_distribution<int> coef(-3, 3), expo(0, degree);
  std::uniform_int_distribution<int> slot(0, 2 * n - 1);
  Poly p;
  for (int t = 0; t < 4; ++t) {
    Exponent e{};
    const int deg = expo(rng);
    for (int i = 0; i < deg; ++i) ++e[slot(rng)];
    p += Poly::monomial(e, GaussQ(mpq_class(coef(rng)), mpq_class(coef(rng))));
  }
  return p;
}

PolyForm random_form(std::mt19937_64& rng, int n, Bideg b, int degree) {
  PolyForm f = PolyForm::zero(n);
  for (Mask m : basis(n).masks(b)) f.add(m, random_poly(rng, n, degree));
  return f;
}

IdentityReport verify_lemma_contraction(int trials, std::uint64_t seed, int n, int form_degree, int field_degree) {
  IdentityReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  struct Cand {
    std::string id, expr;
    bool use_del_on_rhs;
    int sign;
  };
  const std::vector<Cand> cands_a = {
      {"a", "dbar(zeta -| del phi) = dbar zeta -| phi - zeta -| dbar del phi", false, -1},
      {"a", "dbar(zeta -| del phi) = dbar zeta -| phi + zeta -| dbar del phi", false, +1},
      {"a", "dbar(zeta -| del phi) = dbar zeta -| del phi - zeta -| dbar del phi", true, -1},
      {"a", "dbar(zeta -| del phi) = dbar zeta -| del phi + zeta -| dbar del phi", true, +1}};
  const std::vector<Cand> cands_b = {
      {"b", "dbar(v -| del phi) = dbar v -| phi + v -| dbar del phi", false, +1},
      {"b", "dbar(v -| del phi) = dbar v -| phi - v -| dbar del phi", false, -1},
      {"b", "dbar(v -| del phi) = dbar v -| del phi + v -| dbar del phi", true, +1},
      {"b", "dbar(v -| del phi) = dbar v -| del phi - v -| dbar del phi", true, -1}};
  for (const auto& c : cands_a) rep.candidates.push_back({c.id, c.expr, 0, 0, ""});
  for (const auto& c : cands_b) rep.candidates.push_back({c.id, c.expr, 0, 0, ""});

  for (int t = 0; t < trials; ++t) {
    std::seed_seq sq{seed, std::uint64_t(t)};
    std::mt19937_64 rng(sq);
    std::uniform_int_distribution<int> deg(0, n);
    const Bideg b{deg(rng), deg(rng)};
    const PolyForm phi = random_form(rng, n, b, form_degree);
    PolyVectorField zeta{n, {}};
    std::vector<Poly> vl;
    for (int j = 0; j < n; ++j) zeta.comp.push_back(random_poly(rng, n, field_degree));
    for (int j = 0; j < n; ++j) vl.push_back(random_poly(rng, n, field_degree));
    const PolyVectorForm v = PolyVectorForm::diagonal(n, vl);

    const PolyForm dphi = del(phi);
    const PolyForm ddphi = delbar(dphi);
    const PolyVectorForm dz = delbar(zeta);
    const PolyVectorForm dv = delbar(v);
    const PolyForm lhs_a = delbar(contract(zeta, dphi));
    const PolyForm lhs_b = delbar(contract(v, dphi));
    const PolyForm za = contract(zeta, ddphi), va = contract(v, ddphi);
    auto run = [&](const Cand& c, size_t slot, const PolyForm& lhs, const PolyVectorForm& dfield,
                   const PolyForm& last) {
      PolyForm rhs = contract(dfield, c.use_del_on_rhs ? dphi : phi);
      if (c.sign > 0) rhs += last;
      else rhs -= last;
      const PolyForm res = lhs - rhs;
      auto& out = rep.candidates[slot];
      if (res.is_zero()) ++out.passes;
      else {
        if (out.fails == 0) out.first_residual = res.str();
        ++out.fails;
      }
    };
    for (size_t i = 0; i < cands_a.size(); ++i) run(cands_a[i], i, lhs_a, dz, za);
    for (size_t i = 0; i < cands_b.size(); ++i) run(cands_b[i], cands_a.size() + i, lhs_b, dv, va);
  }
  for (const auto& c : rep.candidates)
    if (c.fails == 0 && trials > 0) {
      std::string& slot = c.identity == "a" ? rep.verified_a : rep.verified_b;
      if (slot.empty()) slot = c.expression;
    }
  return rep;
}

}  // namespace nh::local
