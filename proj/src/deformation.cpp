#include "nilhodge/deformation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

namespace nh {

namespace {

using K = OperatorTag;
const cd kI(0, 1);

void require_ddbar(const InvariantModel& m) {
  if (!check_ddbar(m).holds) throw Error(ErrorKind::LemmaRequired, "the ddbar-lemma fails on this model");
}

VecC random_vec(std::mt19937_64& rng, Eigen::Index k) {
  std::normal_distribution<double> N;
  VecC v(k);
  for (auto& x : v) x = cd(N(rng), N(rng));
  return v;
}

MatC kernel_basis(const MatC& a, Eigen::Index cols) {
  if (a.rows() == 0) return MatC::Identity(cols, cols);
  return kernel(a);
}

MatC solve_square(const MatC& a, const MatC& b) { return a.fullPivLu().solve(b); }

std::string fmt_h(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", h);
  return buf;
}

Form top_holomorphic(int n, cd c) {
  std::vector<int> I(n);
  for (int i = 0; i < n; ++i) I[i] = i + 1;
  return Form::monomial(n, I, {}, c);
}

// Generator index of the j-th (0,1) basis element.
int bar_generator(int n, int b) { return std::countr_zero(basis(n).mask({0, 1}, b)); }

// Coefficients c_0..c_deg of a vector polynomial s -> f(s), sampled on the unit circle.
std::vector<VecC> poly_coeffs(const std::function<VecC(cd)>& f, int deg) {
  const int N = deg + 1;
  std::vector<VecC> vals;
  for (int l = 0; l < N; ++l) vals.push_back(f(std::polar(1.0, 2 * std::numbers::pi * l / N)));
  std::vector<VecC> c(N, VecC::Zero(vals[0].size()));
  for (int k = 0; k < N; ++k) {
    for (int l = 0; l < N; ++l) c[k] += vals[l] * std::polar(1.0, -2 * std::numbers::pi * l * k / N);
    c[k] /= double(N);
  }
  return c;
}

VectorValuedForm beltrami_from(int n, const VecC& flat) { return VectorValuedForm::from_vector(n, 1, flat); }

// Jacobian of the integrability residual at phi (complex-linear).
MatC mc_jacobian(const InvariantModel& m, const VecC& phi) {
  const int n = m.n();
  const Eigen::Index N = phi.size();
  MatC J;
  for (Eigen::Index c = 0; c < N; ++c) {
    const auto co = poly_coeffs(
        [&](cd s) {
          VecC x = phi;
          x(c) += s;
          return mc_residual(m, beltrami_from(n, x));
        },
        n + 1);
    if (c == 0) J = MatC::Zero(co[1].size(), N);
    J.col(c) = co[1];
  }
  return J;
}

VecC series(const std::vector<VectorValuedForm>& orders, cd t) {
  VecC x = VecC::Zero(orders.front().flat().size());
  cd tk = 1.0;
  for (const auto& o : orders) {
    tk *= t;
    x += tk * o.flat();
  }
  return x;
}

// Gauss-Newton to an exact zero of the integrability residual.
VecC newton_complete(const InvariantModel& m, VecC phi, double* residual) {
  const int n = m.n();
  double r = mc_residual(m, beltrami_from(n, phi)).norm();
  for (int it = 0; it < 40 && r > 1e-14; ++it) {
    const VecC R = mc_residual(m, beltrami_from(n, phi));
    phi -= pinv_solve(mc_jacobian(m, phi), R);
    const double nr = mc_residual(m, beltrami_from(n, phi)).norm();
    if (nr >= r && nr < 1e-12) {
      r = nr;
      break;
    }
    r = nr;
  }
  *residual = r;
  return phi;
}

LieAlgebraPresentation fibre_presentation(const InvariantModel& m, const VecC& phi) {
  const int n = m.n();
  const MatC P = m.coframe();
  const MatC Phi = beltrami_from(n, phi).coeff;  // rows: (0,1) basis, columns: frame
  MatC bars(n, 2 * n);
  for (int b = 0; b < n; ++b) bars.row(b) = P.row(bar_generator(n, b) - n).conjugate();
  LieAlgebraPresentation p = m.presentation();
  p.J.reset();
  p.coframe = P + Phi.transpose() * bars;
  return p;
}

// The same real form written in the basis of another complex structure.
Form transport(const InvariantModel& from, const InvariantModel& to, const Form& f) {
  return from_alg(to.n(), substitute(to.real_in_complex(), from.to_real_coframe(f)));
}

// Component of the Aeppli (n-2,n) part of a form outside Im del + Im delbar.
VecC aeppli_residue(const InvariantModel& m, const Form& f) {
  const int n = m.n();
  const Flavor fl = Flavor::aeppli(n - 2, n);
  const VecC c = f.component({n - 2, n});
  const MatC B = image(coboundary_generators(m, fl));
  return B.cols() ? VecC(c - B * (B.adjoint() * c)) : c;
}

std::vector<std::pair<std::string, bool>> fibre_checks(const InvariantModel& m, const DeformationOptions& opt) {
  const int n = m.n();
  std::vector<std::pair<std::string, bool>> out;
  out.emplace_back("calabi_yau", m.apply({K::d}, top_holomorphic(n, 1.0)).norm() <= 1e-10);
  out.emplace_back("ddbar", check_ddbar(m).holds);
  for (double h : opt.hs) out.emplace_back("h_ddbar(h=" + fmt_h(h) + ")", check_h_ddbar(m, h).holds);
  if (!opt.structures) return out;
  auto found = [&](const StructureKind& k) { return find_structure(m, k).status == SearchStatus::Found; };
  out.emplace_back("gauduchon", found(StructureKind::gauduchon()));
  out.emplace_back("balanced", found(StructureKind::balanced()));
  std::vector<int> ps = opt.ps;
  if (ps.empty()) ps = n > 2 ? std::vector<int>{1, n - 1} : std::vector<int>{1};
  for (int p : ps) {
    out.emplace_back(std::string("pskt(p=") + std::to_string(p) + ")", found(StructureKind::pskt(p)));
    for (double h : opt.hs)
      out.emplace_back("hphs(p=" + std::to_string(p) + ",h=" + fmt_h(h) + ")", found(StructureKind::hphs(p, h)));
  }
  for (double h : opt.hs) out.emplace_back("hsg(h=" + fmt_h(h) + ")", found(StructureKind::hsg(h)));
  return out;
}

// d-closed form in [omega^{n-1}]_A when the base allows it: the minimal correction
// of omega^{n-1} itself, which stays positive where the harmonic-based one may not.
std::optional<Form> copolarising_form(const HermitianMetric* g) {
  if (!g) return std::nullopt;
  const InvariantModel& m = g->model();
  const int n = m.n();
  if (!check_ddbar(m).holds) return std::nullopt;
  const auto grp = compute_group(m, Flavor::aeppli(n - 1, n - 1));
  const Form w = power(g->omega(), n - 1);
  if (!grp.is_cocycle(grp.to_vector(w))) return std::nullopt;
  return d_closed_correction(*g, w).chi_min;
}

void finish_fibre(const InvariantModel& base, const std::optional<Form>& Omega, Fibre& f) {
  const InvariantModel& mt = *f.model;
  const int n = mt.n();
  f.u = top_holomorphic(n, 1.0);
  if (!Omega) return;
  const Form Ot = transport(base, mt, *Omega);
  f.copolar_projection = aeppli_residue(mt, Ot).norm();
  try {
    f.omega = michelsohn_root(mt, Ot.part({n - 1, n - 1})).omega;
  } catch (const Error&) {
    f.omega.reset();
  }
}

DeformationFamily assemble(const InvariantModel& base, const std::vector<double>& grid,
                           const std::function<Fibre(double)>& make, const DeformationOptions& opt,
                           const HermitianMetric* metric) {
  DeformationFamily fam;
  fam.grid = grid;
  const auto Omega = copolarising_form(metric);
  const auto base_checks = fibre_checks(base, opt);
  bool base_root = false;
  if (Omega) {
    try {
      michelsohn_root(base, Omega->part({base.n() - 1, base.n() - 1}));
      base_root = true;
    } catch (const Error&) {
    }
  }
  for (double t : grid) {
    Fibre f = make(t);
    if (f.integrable) finish_fibre(base, Omega, f);
    fam.report.lines.push_back({t, "integrable", true, f.integrable});
    if (f.integrable) {
      const auto checks = fibre_checks(*f.model, opt);
      for (size_t i = 0; i < checks.size(); ++i)
        fam.report.lines.push_back({t, checks[i].first, base_checks[i].second, checks[i].second});
      if (Omega) fam.report.lines.push_back({t, "copolarised_gauduchon", base_root, f.omega.has_value()});
    } else {
      for (const auto& [name, b] : base_checks) fam.report.lines.push_back({t, name, b, false});
    }
    fam.fibres.push_back(std::move(f));
  }
  return fam;
}

}  // namespace

VectorValuedForm TrivializingForm::pull_back(const Form& a, int q) const {
  const int n = u.n();
  return VectorValuedForm::from_vector(n, q, solve_square(T(q), a.component({n - 1, q})));
}

TrivializingForm make_trivializer(const InvariantModel& m, const Form& u) {
  const int n = m.n();
  if (u.n() != n || !u.pure() || !(u.bideg() == Bideg{n, 0}) || u.norm() == 0.0)
    throw Error(ErrorKind::NoTrivializer, "u must be a nonzero (n,0)-form");
  if (m.apply({K::d}, u).norm() > 1e-10 * u.norm()) throw Error(ErrorKind::NoTrivializer, "u is not closed");
  TrivializingForm t;
  t.u = u;
  t.wedge_top = top_coefficient(wedge(u, conjugate(u)));
  if (std::abs(t.wedge_top) <= 1e-12 * u.norm() * u.norm())
    throw Error(ErrorKind::NoTrivializer, "u ^ conj(u) vanishes");
  for (int q = 0; q <= n; ++q) {
    t.pairing[q] = contraction_matrix(u, q);
    if (rank(t.pairing[q]) != t.pairing[q].cols()) throw Error(ErrorKind::NoTrivializer, "pairing is not invertible");
  }
  return t;
}

TrivializingForm catalog_trivializer(const CatalogEntry& e, const InvariantModel& m) {
  if (!e.trivializing_u) throw Error(ErrorKind::NoTrivializer, "entry '" + e.name + "' has no trivializing form");
  return make_trivializer(m, top_holomorphic(m.n(), *e.trivializing_u));
}

MatC vector_dbar(const InvariantModel& m, int q) {
  const int n = m.n();
  const auto& B = basis(n);
  const int cols = B.dim({0, q}) * n;
  if (q >= n) return MatC::Zero(0, cols);
  MatC out = MatC::Zero(B.dim({0, q + 1}) * n, cols);
  const MatC D = m.delbar({0, q});
  const MatC C = m.delbar({1, 0});  // (1,1) part of d phi^a in column a
  const double sq = q % 2 ? -1.0 : 1.0;
  for (int J = 0; J < B.dim({0, q}); ++J) {
    const Mask mJ = B.mask({0, q}, J);
    for (int j = 0; j < n; ++j) {
      const int col = J * n + j;
      for (int Kx = 0; Kx < D.rows(); ++Kx) out(Kx * n + j, col) += D(Kx, J);
      for (int b = 0; b < n; ++b) {
        const Mask mb = Mask(1) << (n + b);
        const int s = wedge_sign(mJ, mb);
        if (!s) continue;
        const int Kx = B.locate(mJ | mb).second;
        const int r11 = B.locate((Mask(1) << j) | mb).second;
        for (int a = 0; a < n; ++a) out(Kx * n + a, col) += sq * s * C(r11, a);
      }
    }
  }
  return out;
}

MatC transported_dbar(const InvariantModel& m, const TrivializingForm& u, int q) {
  const int n = m.n();
  if (q >= n) return MatC::Zero(0, u.T(q).cols());
  return solve_square(u.T(q + 1), m.block({K::delbar}, {n - 1, q}, {n - 1, q + 1}) * u.T(q));
}

VecC TangentCohomology::coordinates(const VectorValuedForm& v) const {
  const VecC x = v.flat();
  if ((dbar1 * x).norm() > 1e-9 * std::max(1.0, x.norm()))
    throw Error(ErrorKind::NotInSubspace, "vector-valued form is not delbar-closed");
  return dolbeault.coordinates(u.T(1) * x);
}

TangentClass TangentCohomology::class_of(const VectorValuedForm& v) const { return {coordinates(v), v}; }

TangentClass TangentCohomology::class_from_coords(const VecC& coords) const {
  if (coords.size() != dim) throw Error(ErrorKind::DegreeMismatch, "coordinate vector has the wrong length");
  const VecC x = dim ? VecC(reps * coords) : VecC::Zero(reps.rows());
  return {coords, VectorValuedForm::from_vector(n, 1, x)};
}

VectorValuedForm TangentCohomology::dbar(const VecC& zeta) const {
  return VectorValuedForm::from_vector(n, 1, dbar0 * zeta);
}

TangentCohomology tangent_cohomology(const InvariantModel& m, const TrivializingForm& u) {
  const int n = m.n();
  if (u.u.n() != n) throw Error(ErrorKind::NoTrivializer, "trivializing form has the wrong dimension");
  TangentCohomology tc;
  tc.n = n;
  tc.u = u;
  tc.dolbeault = compute_group(m, Flavor::dolbeault(n - 1, 1));
  tc.aeppli = compute_group(m, Flavor::aeppli(n - 1, 1));
  tc.dim = tc.dolbeault.dim;
  tc.dbar0 = transported_dbar(m, u, 0);
  tc.dbar1 = transported_dbar(m, u, 1);
  tc.reps = tc.dim ? solve_square(u.T(1), tc.dolbeault.reps) : MatC(u.T(1).cols(), 0);
  return tc;
}

VecC copolarisation_class(const InvariantModel& m, const VectorValuedForm& v, const Form& Omega) {
  const int n = m.n();
  const auto grp = compute_group(m, Flavor::aeppli(n - 2, n));
  return grp.coordinates(contract(v, Omega.part({n - 1, n - 1})).component({n - 2, n}));
}

bool CopolarisedSubspace::contains(const VecC& coords, double tol) const {
  return (condition * coords).norm() <= tol * std::max(1.0, coords.norm());
}

bool CopolarisedSubspace::dolbeault_contains(const VecC& coords, double tol) const {
  return (dolbeault_condition * coords).norm() <= tol * std::max(1.0, coords.norm());
}

CopolarisedSubspace copolarised_subspace(const HermitianMetric& g, const TangentCohomology& tc, int gauge_trials,
                                         std::uint64_t seed) {
  const InvariantModel& m = g.model();
  const int n = m.n();
  require_ddbar(m);
  const auto grp = compute_group(m, Flavor::aeppli(n - 1, n - 1));
  const Form Omega = minimal_d_closed_rep(g, class_of(grp, power(g.omega(), n - 1))).chi_min;
  return copolarised_subspace(g, tc, Omega, gauge_trials, seed);
}

CopolarisedSubspace copolarised_subspace(const HermitianMetric& g, const TangentCohomology& tc, const Form& Omega,
                                         int gauge_trials, std::uint64_t seed) {
  const InvariantModel& m = g.model();
  const int n = m.n();
  require_ddbar(m);
  const Form Om = Omega.part({n - 1, n - 1});
  if (m.apply({K::d}, Om).norm() > 1e-9 * std::max(1.0, Om.norm()))
    throw Error(ErrorKind::NotInSubspace, "co-polarising form is not d-closed");
  CopolarisedSubspace cs;
  cs.omega_power = Om;
  const auto A = compute_group(m, Flavor::aeppli(n - 2, n));
  const auto D = compute_group(m, Flavor::dolbeault(n - 2, n));
  const MatC C = contraction_matrix(Om, 1);
  cs.condition = MatC::Zero(A.dim, tc.dim);
  cs.dolbeault_condition = MatC::Zero(D.dim, tc.dim);
  for (int c = 0; c < tc.dim; ++c) {
    const VecC y = C * tc.reps.col(c);
    cs.condition.col(c) = A.coordinates(y);
    cs.dolbeault_condition.col(c) = D.coordinates(y);
  }
  cs.basis = kernel_basis(cs.condition, tc.dim);
  cs.dolbeault_basis = kernel_basis(cs.dolbeault_condition, tc.dim);
  cs.dim = static_cast<int>(cs.basis.cols());
  cs.dolbeault_dim = static_cast<int>(cs.dolbeault_basis.cols());
  std::mt19937_64 rng(seed);
  cs.gauge_trials = gauge_trials;
  for (int t = 0; t < gauge_trials; ++t) {
    const VecC y = C * tc.dbar0 * random_vec(rng, n);
    if (A.dim) cs.gauge_residual = std::max(cs.gauge_residual, A.coordinates(y).norm());
  }
  return cs;
}

PolarisedSubspace polarised_subspace(const HermitianMetric& g, const TangentCohomology& tc) {
  const InvariantModel& m = g.model();
  const auto D = compute_group(m, Flavor::dolbeault(0, 2));
  const MatC C = contraction_matrix(g.omega(), 1);
  MatC cond = MatC::Zero(D.dim, tc.dim);
  for (int c = 0; c < tc.dim; ++c) cond.col(c) = D.coordinates(C * tc.reps.col(c));
  PolarisedSubspace ps;
  ps.basis = kernel_basis(cond, tc.dim);
  ps.dim = static_cast<int>(ps.basis.cols());
  return ps;
}

VecC aeppli_image(const TangentCohomology& tc, const VecC& coords) {
  const VecC x = tc.dim ? VecC(tc.reps * coords) : VecC::Zero(tc.reps.rows());
  return tc.aeppli.coordinates(tc.u.T(1) * x);
}

bool GprimSpace::contains(const VecC& x, double tol) const {
  return dist_to_span(aeppli_basis, x) <= tol * std::max(1.0, x.norm());
}

GprimSpace gprim_space(const HermitianMetric& g, const TangentCohomology& tc, const CopolarisedSubspace& cs) {
  require_ddbar(g.model());
  MatC img(tc.aeppli.dim, cs.dim);
  for (int c = 0; c < cs.dim; ++c) img.col(c) = aeppli_image(tc, cs.basis.col(c));
  GprimSpace gs;
  gs.aeppli_basis = cs.dim ? image(img) : MatC(tc.aeppli.dim, 0);
  gs.dim = static_cast<int>(gs.aeppli_basis.cols());
  return gs;
}

PrimitivityReport primitivity_report(const HermitianMetric& g, const TangentCohomology& tc,
                                     const CopolarisedSubspace& cs, const VecC& coords) {
  const InvariantModel& m = g.model();
  const int n = m.n();
  if (!cs.contains(coords)) throw Error(ErrorKind::NotInSubspace, "tangent class is not co-polarised");
  PrimitivityReport r;
  r.coords = coords;
  const TangentClass tcls = tc.class_from_coords(coords);
  const Form& w = g.omega();

  // (i)
  const auto H = compute_group(m, Flavor::aeppli(n - 1, 1), &g);
  const VecC hc = H.coordinates(tc.u.T(1) * tcls.v.flat());
  r.harmonic = H.to_form(H.dim ? VecC(H.reps * hc) : VecC::Zero(H.space_dim()));
  r.harmonic_primitivity = wedge(w, r.harmonic).norm();
  r.harmonic_primitive = g.is_primitive(r.harmonic);

  // (ii)
  const Form& Om = cs.omega_power;
  const VecC y = contract(tcls.v, Om).component({n - 2, n});
  const MatC Db = m.block({K::delbar}, {n - 2, n - 1}, {n - 2, n});
  MatC prim(basis(n).dim({1, 2}), 0), lift(Db.cols(), 0);
  if (n >= 3) {
    prim = kernel_basis(wedge_matrix(power(w, n - 2), {1, 2}), basis(n).dim({1, 2}));
    lift = wedge_matrix(power(w, n - 3), {1, 2}) * prim;
  }
  MatC Z(Db.cols(), n);
  for (int j = 0; j < n; ++j) Z.col(j) = contract(VecC(VecC::Unit(n, j)), Om).component({n - 2, n - 1});
  MatC A(Db.rows(), lift.cols() + n);
  A << Db * lift, Db * Z;
  const VecC x = pinv_solve(A, y);
  r.decomposition_residual = (A * x - y).norm();
  r.decomposition_nullity = static_cast<int>(A.cols()) - rank(A);
  r.zeta = x.tail(n);
  r.v0 = lift.cols() ? Form::block(n, {1, 2}, prim * x.head(lift.cols())) : Form::zero(n, {1, 2});

  // (iii)
  const double scale = std::max(1.0, tcls.v.flat().norm());
  r.d_v_omega = m.apply({K::d}, contract(tcls.v, w)).norm();
  const VecC vw = contract(tcls.v, power(w, n - 1)).component({n - 2, n});
  r.laplacian_v_omega = (g.laplacian(LaplacianFlavor::Aeppli, {n - 2, n}) * vw).norm();
  r.closed = r.d_v_omega <= 1e-9 * scale;
  r.harmonic_contraction = r.laplacian_v_omega <= 1e-9 * scale;
  r.equivalence_agrees = r.closed == r.harmonic_contraction;
  return r;
}

ModuliMetrics moduli_metrics(const HermitianMetric& g, const TangentCohomology& tc, const MatC& basis) {
  const InvariantModel& m = g.model();
  const int n = m.n();
  require_ddbar(m);
  ModuliMetrics mm;
  const Form& u = tc.u.u;
  const cd D = std::pow(kI, n * n) * g.integral(wedge(u, conjugate(u)));
  if (std::abs(D.imag()) > 1e-9 * std::abs(D) || D.real() <= 0)
    throw Error(ErrorKind::NoTrivializer, "i^{n^2} int u ^ conj(u) is not positive");
  mm.denominator = D.real();
  mm.volume = g.integral(g.volume()).real();
  const int k = static_cast<int>(basis.cols());
  std::vector<VecC> vs;
  for (int c = 0; c < k; ++c) {
    const VecC x = tc.reps * basis.col(c);
    const Form w = Form::block(n, {n - 1, 1}, tc.u.T(1) * x);
    const Form wm = minimal_d_closed_rep(g, class_of(tc.aeppli, w)).chi_min;
    mm.reps.push_back(wm);
    vs.push_back(tc.u.pull_back(wm, 1).flat());
    const auto s = g.lefschetz_split(wm);
    mm.prim_norm2.push_back(std::pow(g.norm(s.prim), 2));
    mm.zeta_norm2.push_back(std::pow(g.norm(s.zeta), 2));
  }
  const cd sign = n % 2 == 0 ? cd(-1.0) : -kI;
  // metric on Lambda^{0,1} (x) T^{1,0}: transported through u, and the tensor metric with <Z_a, Z_b> = h_ab
  const MatC& G = g.gram({n - 1, 1}).gram();
  const double u2 = std::pow(g.norm(u), 2);
  const MatC GT = tc.u.T(1).adjoint() * G * tc.u.T(1) / u2;
  const MatC& G01 = g.gram({0, 1}).gram();
  const MatC hT = g.h().transpose();
  MatC GX(n * n, n * n);
  for (int J = 0; J < n; ++J)
    for (int Kx = 0; Kx < n; ++Kx) GX.block(J * n, Kx * n, n, n) = G01(J, Kx) * hT;
  mm.g1 = mm.g1_tensor = mm.g2 = mm.gamma = MatC::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      mm.g2(i, j) = g.inner(mm.reps[j], mm.reps[i]) / mm.denominator;
      mm.gamma(i, j) = sign * g.integral(wedge(mm.reps[j], conjugate(mm.reps[i]))) / mm.denominator;
      mm.g1(i, j) = vs[i].dot(GT * vs[j]) / mm.volume;
      mm.g1_tensor(i, j) = vs[i].dot(GX * vs[j]) / mm.volume;
    }
  for (int i = 0; i < k; ++i) {
    const double p = mm.prim_norm2[i], z = mm.zeta_norm2[i];
    mm.g2_formula_residual = std::max(mm.g2_formula_residual, std::abs(mm.g2(i, i) - (p + 2 * z) / mm.denominator));
    mm.gamma_formula_residual =
        std::max(mm.gamma_formula_residual, std::abs(mm.gamma(i, i) - (p - 2 * z) / mm.denominator));
    mm.difference_residual =
        std::max(mm.difference_residual, std::abs(mm.g2(i, i) - mm.gamma(i, i) - 4 * z / mm.denominator));
  }
  mm.g1_discrepancy = (mm.g1 - mm.g1_tensor).norm();
  return mm;
}

bool OpennessReport::ok() const {
  for (const auto& l : lines)
    if (!l.retained()) return false;
  return true;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int i = 0; i < 9; ++i) g.push_back(-0.2 + 0.05 * i);
  g[4] = 0.0;
  return g;
}

VecC mc_residual(const InvariantModel& m, const VectorValuedForm& phi) {
  const int n = m.n();
  const Eigen::Index size = Eigen::Index(1) << (2 * n);
  const auto& dg = m.dgen();
  std::vector<AlgVec> gen(n, AlgVec::Zero(size)), dgen(n);
  for (int j = 0; j < n; ++j) {
    gen[j](Mask(1) << j) = 1.0;
    dgen[j] = dg[j];
    for (int b = 0; b < n; ++b) {
      const cd c = phi.coeff(b, j);
      if (c == 0.0) continue;
      const int gb = bar_generator(n, b);
      gen[j](Mask(1) << gb) += c;
      dgen[j] += c * dg[gb];
    }
  }
  AlgVec U = AlgVec::Zero(size);
  U(0) = 1.0;
  for (int j = 0; j < n; ++j) U = alg_wedge(U, gen[j]);
  std::vector<Mask> masks;
  for (Eigen::Index k = 0; k < size; ++k)
    if (std::popcount(Mask(k)) == n + 2) masks.push_back(Mask(k));
  VecC out(n * masks.size());
  for (int j = 0; j < n; ++j) {
    const AlgVec r = alg_wedge(dgen[j], U);
    for (size_t i = 0; i < masks.size(); ++i) out(j * masks.size() + i) = r(masks[i]);
  }
  return out;
}

DeformationFamily deform_family(const InvariantModel& m, const TangentClass& v, const std::vector<double>& grid,
                                const DeformationOptions& opt, const HermitianMetric* metric) {
  const int n = m.n();
  if (v.v.n != n || v.v.q != 1) throw Error(ErrorKind::DegreeMismatch, "expected a (0,1)-form with values in T^{1,0}");
  const VecC v1 = v.v.flat();
  const MatC L = mc_jacobian(m, VecC::Zero(v1.size()));
  if ((L * v1).norm() > 1e-9 * std::max(1.0, v1.norm()))
    throw Error(ErrorKind::NotInSubspace, "tangent representative does not solve the linearized equation");
  std::vector<VectorValuedForm> orders = {v.v};
  for (int k = 2; k <= opt.order; ++k) {
    const auto co = poly_coeffs([&](cd s) { return mc_residual(m, beltrami_from(n, series(orders, s))); },
                                (n + 1) * (k - 1));
    const VecC rhs = co[k];
    const VecC x = pinv_solve(L, -rhs);
    if ((L * x + rhs).norm() > 1e-9 * std::max(1.0, rhs.norm()))
      throw Error(ErrorKind::MCObstructed, "order " + std::to_string(k) + " term has no invariant solution");
    orders.push_back(beltrami_from(n, x));
  }
  auto solve_at = [&](double t, Fibre& f) {
    VecC phi = series(orders, t);
    f.mc_residual = mc_residual(m, beltrami_from(n, phi)).norm();
    if (opt.newton) phi = newton_complete(m, phi, &f.mc_residual);
    f.beltrami = beltrami_from(n, phi);
    try {
      f.model = build_model(fibre_presentation(m, phi));
      f.integrable = true;
    } catch (const Error& e) {
      f.error = e.what();
    }
  };
  auto make = [&](double t) {
    Fibre f;
    f.t = t;
    solve_at(t, f);
    return f;
  };
  DeformationFamily fam = assemble(m, grid, make, opt, metric);
  fam.orders = orders;

  if (const auto Omega = copolarising_form(metric); Omega && opt.gauss_manin_step > 0) {
    const double s = opt.gauss_manin_step;
    Fibre fp, fm;
    fp.t = s;
    fm.t = -s;
    solve_at(s, fp);
    solve_at(-s, fm);
    GaussManinCheck gm;
    gm.step = s;
    gm.tolerance = 10 * s;
    const VecC pred = -aeppli_residue(m, contract(v.v, *Omega));
    gm.predicted_norm = pred.norm();
    if (fp.integrable && fm.integrable) {
      const VecC fd = (aeppli_residue(*fp.model, transport(m, *fp.model, *Omega)) -
                       aeppli_residue(*fm.model, transport(m, *fm.model, *Omega))) /
                      (2 * s);
      gm.error = (fd - pred).norm();
      gm.ok = gm.error <= gm.tolerance;
    } else {
      gm.error = INFINITY;
    }
    fam.gauss_manin = gm;
  }
  return fam;
}

DeformationFamily catalog_family(const CatalogEntry& e, const std::vector<double>& grid,
                                 const DeformationOptions& opt) {
  if (!e.family) throw Error(ErrorKind::SchemaError, "entry '" + e.name + "' has no family");
  const InvariantModel base = build_model(e.presentation);
  const HermitianMetric g(base, e.metric);
  auto make = [&](double t) {
    Fibre f;
    f.t = t;
    f.beltrami = VectorValuedForm::zero(base.n(), 1);
    try {
      f.model = build_model(family_member(e, e.family->base + t).presentation);
      f.integrable = true;
    } catch (const Error& err) {
      f.error = err.what();
    }
    return f;
  };
  return assemble(base, grid, make, opt, &g);
}

}  // namespace nh
