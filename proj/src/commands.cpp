#include "nilhodge/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nilhodge/local_calculus.hpp"

namespace nh {

namespace {

using K = OperatorTag;

std::string str(double x) { return fmt_double(x); }

VecC random_coords(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecC v(k);
  for (int i = 0; i < k; ++i) v(i) = cd(u(rng), u(rng));
  return v;
}

std::vector<int> default_ps(int n, const std::vector<int>& ps) {
  if (!ps.empty()) return ps;
  return n == 2 ? std::vector<int>{1} : std::vector<int>{1, n - 1};
}

std::vector<double> default_hs(const std::vector<double>& hs, std::vector<double> fallback) {
  return hs.empty() ? fallback : hs;
}

// Model-level mathematical failure: recorded as a failed check instead of thrown.
template <class F>
bool guarded(RunReport& r, const std::string& name, F&& f) {
  try {
    f();
    return true;
  } catch (const Error& e) {
    if (is_input_error(e.kind)) throw;
    r.check(name, false, e.what());
    return false;
  }
}

struct Loaded {
  CatalogEntry entry;
  InvariantModel m;
};

Loaded load(const CommandOptions& o, RunReport& r) {
  if (o.target.empty()) throw Error(ErrorKind::SchemaError, "missing catalog entry or document path");
  Loaded l{resolve_entry(o.target), {}};
  l.m = build_model(l.entry.presentation);
  r.model_name = l.entry.name;
  r.fingerprint = fingerprint(l.entry.presentation);
  return l;
}

void cohomology_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const int n = l.m.n();
  const auto hs = default_hs(o.hs, {2.0});
  const HermitianMetric g(l.m, l.entry.metric);
  r.columns = {"flavor", "p", "q", "k", "h", "dim"};
  json dims = json::array();
  auto add = [&](const Flavor& f) {
    const auto grp = compute_group(l.m, f, &g);
    const bool tot = f.total();
    const bool twisted = f.kind == Flavor::Dh || f.kind == Flavor::HAeppli;
    r.rows.push_back({f.name(), tot ? "" : std::to_string(f.p), tot ? "" : std::to_string(f.q), std::to_string(f.k),
                      twisted ? str(f.h) : "", std::to_string(grp.dim)});
    json d = {{"flavor", f.name()}, {"k", f.k}};
    if (!tot) d["p"] = f.p, d["q"] = f.q;
    if (twisted) d["h"] = f.h;
    d["dim"] = grp.dim;
    dims.push_back(d);
  };
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      add(Flavor::dolbeault(p, q));
      add(Flavor::bott_chern(p, q));
      add(Flavor::aeppli(p, q));
    }
  for (int k = 0; k <= 2 * n; ++k) add(Flavor::de_rham(k));
  for (double h : hs)
    for (int k = 0; k <= 2 * n; ++k) {
      add(Flavor::dh(k, h));
      add(Flavor::h_aeppli(k, h));
    }
  r.data["dimensions"] = dims;
  r.check("operator_identities", operator_identity_residual(l.m, hs), 1e-12);
}

void lemma_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const auto hs = default_hs(o.hs, {1.0, -1.0, 0.5, 2.0});
  json verdicts = json::array();
  auto record = [&](const LemmaVerdict& v, const std::string& name) {
    json j = {{"lemma", v.kind}, {"holds", v.holds}, {"checks", v.checks}};
    if (v.kind == "h_ddbar") j["h"] = v.h;
    if (!v.holds) {
      j["location"] = v.location;
      if (v.witness) j["witness"] = to_json(*v.witness);
    }
    verdicts.push_back(j);
    r.check(name, v.holds, v.location);
  };
  record(check_ddbar(l.m), "ddbar_lemma");
  for (double h : hs) record(check_h_ddbar(l.m, h), "h_ddbar_lemma(h=" + str(h) + ")");
  r.data["verdicts"] = verdicts;
}

void verify_lemma_cmd(const CommandOptions& o, RunReport& r) {
  if (o.n < 2 || o.n > 3) throw Error(ErrorKind::SchemaError, "--n must be 2 or 3");
  if (o.trials <= 0) throw Error(ErrorKind::SchemaError, "--trials must be positive");
  r.model_name = "chart C^" + std::to_string(o.n);
  const auto rep = local::verify_lemma_contraction(o.trials, o.seed, o.n);
  json cands = json::array();
  for (const auto& c : rep.candidates) {
    json j = {{"identity", c.identity}, {"expression", c.expression}, {"passes", c.passes}, {"fails", c.fails}};
    if (!c.first_residual.empty()) j["first_residual"] = c.first_residual;
    cands.push_back(j);
  }
  r.data = {{"n", rep.n}, {"trials", rep.trials}, {"candidates", cands},
            {"verified_a", rep.verified_a}, {"verified_b", rep.verified_b}};
  r.check("identity_a", !rep.verified_a.empty(), rep.verified_a.empty() ? "no candidate holds" : rep.verified_a);
  r.check("identity_b", !rep.verified_b.empty(), rep.verified_b.empty() ? "no candidate holds" : rep.verified_b);
}

void minimal_rep_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const int n = l.m.n();
  const HermitianMetric g(l.m, l.entry.metric);
  std::mt19937_64 rng(o.seed);
  json reps = json::array();
  guarded(r, "ddbar_lemma", [&] {
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) {
        const auto grp = compute_group(l.m, Flavor::aeppli(p, q), &g);
        if (!grp.dim) continue;
        const auto cls = class_from_coords(grp, random_coords(rng, grp.dim));
        const auto mr = minimal_d_closed_rep(g, cls);
        const std::string tag = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
        const double in_class = (class_of(grp, mr.chi_min).coords - cls.coords).norm();
        r.check("d_closed" + tag, l.m.apply({K::d}, mr.chi_min).norm(), o.tol);
        r.check("in_class" + tag, in_class, o.tol);
        reps.push_back({{"bidegree", {p, q}},
                        {"coords", to_json(cls.coords)},
                        {"chi_norm", g.norm(mr.chi)},
                        {"chi_min_norm", g.norm(mr.chi_min)},
                        {"phi_min_norm", g.norm(mr.phi_min)},
                        {"psi_min_norm", g.norm(mr.psi_min)},
                        {"chi_min", to_json(mr.chi_min)}});
      }
  });
  r.data["representatives"] = reps;
}

std::vector<StructureKind> structure_kinds(int n, const std::vector<double>& hs, const std::vector<int>& ps) {
  std::vector<StructureKind> out = {StructureKind::gauduchon(), StructureKind::balanced(), StructureKind::sg()};
  for (double h : hs) {
    out.push_back(StructureKind::hsg(h));
    out.push_back(StructureKind::h_gauduchon(h));
  }
  for (int p : ps) {
    if (p < 1 || p > n - 1) throw Error(ErrorKind::DegreeMismatch, "--p must lie in 1..n-1");
    out.push_back(StructureKind::pskt(p));
    out.push_back(StructureKind::phs(p));
    for (double h : hs) out.push_back(StructureKind::hphs(p, h));
  }
  return out;
}

void structures_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const int n = l.m.n();
  const auto hs = default_hs(o.hs, {2.0});
  const HermitianMetric g(l.m, l.entry.metric);
  r.columns = {"structure", "search", "margin", "entry_metric"};
  json res = json::array();
  for (const auto& k : structure_kinds(n, hs, default_ps(n, o.ps))) {
    const auto s = find_structure(l.m, k, 200, o.seed);
    const Form metric_candidate = k.metric() ? g.omega() : power(g.omega(), k.p);
    const bool entry_ok = check_structure(l.m, metric_candidate, k).certified;
    json j = {{"structure", k.name()}, {"search", status_name(s.status)}, {"margin", s.margin},
              {"entry_metric", entry_ok}};
    if (!s.detail.empty()) j["detail"] = s.detail;
    if (s.cert) j["candidate"] = to_json(s.cert->candidate);
    if (s.dual) j["dual"] = to_json(*s.dual);
    res.push_back(j);
    r.rows.push_back({k.name(), status_name(s.status), str(s.margin), entry_ok ? "true" : "false"});
    // a found structure must re-certify through the direct check
    if (s.cert) r.check("certificate:" + k.name(), check_structure(l.m, s.cert->candidate, k).certified);
  }
  r.data["structures"] = res;
}

void audit_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const auto hs = default_hs(o.hs, {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0});
  const auto rep = audit_equivalences(l.m, hs, default_ps(l.m.n(), o.ps), o.seed);
  json lines = json::array();
  r.columns = {"check", "h", "p", "status", "detail"};
  for (const auto& a : rep.lines) {
    lines.push_back({{"check", a.check}, {"h", a.h}, {"p", a.p}, {"status", a.status}, {"detail", a.detail}});
    r.rows.push_back({a.check, str(a.h), std::to_string(a.p), a.status, a.detail});
    if (a.status == "disagree" || a.status == "failed")
      r.check(a.check + "(h=" + str(a.h) + ",p=" + std::to_string(a.p) + ")", false, a.detail);
  }
  r.check("audit", rep.ok());
  r.data["lines"] = lines;
}

struct TangentSetup {
  TangentCohomology tc;
  std::optional<CopolarisedSubspace> cs;
};

TangentSetup tangent_setup(const Loaded& l, const HermitianMetric& g, const CommandOptions& o) {
  TangentSetup s{tangent_cohomology(l.m, catalog_trivializer(l.entry, l.m)), std::nullopt};
  s.cs = copolarised_subspace(g, s.tc, 20, o.seed);
  return s;
}

void copolarised_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const HermitianMetric g(l.m, l.entry.metric);
  guarded(r, "copolarised", [&] {
    const auto s = tangent_setup(l, g, o);
    const auto& cs = *s.cs;
    const bool balanced = check_structure(l.m, g.omega(), StructureKind::balanced()).certified;
    r.data["tangent_dim"] = s.tc.dim;
    r.data["copolarised_dim"] = cs.dim;
    r.data["dolbeault_condition_dim"] = cs.dolbeault_dim;
    r.data["balanced"] = balanced;
    r.data["basis"] = to_json(cs.basis);
    r.check("gauge_invariance", cs.gauge_residual, 1e-10, std::to_string(cs.gauge_trials) + " trials");
    // Dolbeault condition versus Aeppli condition on random classes
    std::mt19937_64 rng(o.seed + 1);
    int agree = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
      const VecC x = t % 2 ? random_coords(rng, s.tc.dim) : VecC(cs.basis * random_coords(rng, cs.dim));
      agree += cs.contains(x) == cs.dolbeault_contains(x);
    }
    r.data["membership_agreement"] = {{"agree", agree}, {"trials", trials}};
    if (balanced) {
      r.check("dolbeault_vs_aeppli_dim", cs.dim == cs.dolbeault_dim,
              std::to_string(cs.dim) + " vs " + std::to_string(cs.dolbeault_dim));
      r.check("dolbeault_vs_aeppli_membership", agree == trials);
    }
    try {
      const auto ps = polarised_subspace(g, s.tc);
      r.data["polarised_dim"] = ps.dim;
      const double gap = (ps.basis - cs.basis * (cs.basis.adjoint() * ps.basis)).norm();
      r.data["polarised_in_copolarised"] = gap;
    } catch (const Error& e) {
      if (e.kind != ErrorKind::NotInSubspace) throw;
      r.data["polarised_dim"] = nullptr;
    }
    const auto gp = gprim_space(g, s.tc, cs);
    r.data["gprim_dim"] = gp.dim;
    r.check("gprim_dim", gp.dim == cs.dim);
    json prim = json::array();
    for (int c = 0; c < cs.dim; ++c) {
      const auto pr = primitivity_report(g, s.tc, cs, cs.basis.col(c));
      prim.push_back({{"direction", c},
                      {"harmonic_primitivity", pr.harmonic_primitivity},
                      {"harmonic_primitive", pr.harmonic_primitive},
                      {"decomposition_residual", pr.decomposition_residual},
                      {"d_v_omega", pr.d_v_omega},
                      {"laplacian_v_omega", pr.laplacian_v_omega},
                      {"equivalence_agrees", pr.equivalence_agrees}});
      r.check("decomposition(" + std::to_string(c) + ")", pr.decomposition_residual, std::max(o.tol, 1e-9));
    }
    r.data["primitivity"] = prim;
  });
}

void wp_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const HermitianMetric g(l.m, l.entry.metric);
  guarded(r, "wp_metrics", [&] {
    const auto s = tangent_setup(l, g, o);
    const auto mm = moduli_metrics(g, s.tc, s.cs->basis);
    r.data["copolarised_dim"] = s.cs->dim;
    r.data["g1"] = to_json(mm.g1);
    r.data["g1_tensor"] = to_json(mm.g1_tensor);
    r.data["g2"] = to_json(mm.g2);
    r.data["gamma"] = to_json(mm.gamma);
    r.data["denominator"] = mm.denominator;
    r.data["zeta_norm2"] = mm.zeta_norm2;
    r.data["prim_norm2"] = mm.prim_norm2;
    double min_diag = 0;
    for (int i = 0; i < mm.g2.rows(); ++i) min_diag = std::min(min_diag, (mm.g2 - mm.gamma)(i, i).real());
    r.check("g2_formula", mm.g2_formula_residual, 1e-9);
    r.check("gamma_formula", mm.gamma_formula_residual, 1e-9);
    r.check("difference_formula", mm.difference_residual, 1e-9);
    r.check("difference_nonnegative", -min_diag, 1e-10);
    r.check("g1_vs_tensor", mm.g1_discrepancy, 1e-8);
  });
}

std::vector<double> grid_of(const CommandOptions& o) {
  if (o.steps < 1 || !(o.t_max >= 0)) throw Error(ErrorKind::SchemaError, "invalid grid");
  std::vector<double> grid;
  for (int i = 0; i < o.steps; ++i) {
    const int k = 2 * i - (o.steps - 1);
    grid.push_back(o.steps == 1 ? 0.0 : o.t_max * k / (o.steps - 1));
  }
  return grid;
}

void deform_cmd(const CommandOptions& o, RunReport& r) {
  auto l = load(o, r);
  const int n = l.m.n();
  const HermitianMetric g(l.m, l.entry.metric);
  DeformationOptions opt;
  opt.order = o.order;
  if (!o.hs.empty()) opt.hs = o.hs;
  opt.ps = default_ps(n, o.ps);
  const auto grid = grid_of(o);
  guarded(r, "deformation", [&] {
    DeformationFamily fam;
    if (o.family) {
      if (!l.entry.family) throw Error(ErrorKind::SchemaError, "entry has no parameter family");
      fam = catalog_family(l.entry, grid, opt);
      r.data["family"] = {{"parameter", l.entry.family->parameter}, {"base", l.entry.family->base}};
    } else {
      const auto tc = tangent_cohomology(l.m, catalog_trivializer(l.entry, l.m));
      if (!tc.dim) throw Error(ErrorKind::NotInSubspace, "no tangent directions");
      std::optional<CopolarisedSubspace> cs;
      try {
        cs = copolarised_subspace(g, tc, 0, o.seed);
      } catch (const Error& e) {
        if (is_input_error(e.kind)) throw;
      }
      VecC coords = VecC::Zero(tc.dim);
      if (o.direction >= 0) {
        if (o.direction >= tc.dim) throw Error(ErrorKind::SchemaError, "--direction outside the tangent space");
        coords(o.direction) = 1.0;
      } else if (cs && cs->dim) {
        coords = cs->basis.col(0);
      } else {
        coords(0) = 1.0;
      }
      r.data["direction"] = to_json(coords);
      fam = deform_family(l.m, tc.class_from_coords(coords), grid, opt, cs ? &g : nullptr);
    }
    json orders = json::array();
    for (const auto& v : fam.orders) orders.push_back(to_json(v));
    r.data["orders"] = orders;
    json fibres = json::array();
    for (const auto& f : fam.fibres) {
      json j = {{"t", f.t}, {"integrable", f.integrable}, {"mc_residual", f.mc_residual},
                {"copolar_projection", f.copolar_projection}};
      if (!f.error.empty()) j["error"] = f.error;
      fibres.push_back(j);
    }
    r.data["fibres"] = fibres;
    json lines = json::array();
    r.columns = {"t", "check", "base", "fibre", "retained"};
    for (const auto& ln : fam.report.lines) {
      lines.push_back({{"t", ln.t}, {"check", ln.check}, {"base", ln.base}, {"fibre", ln.fibre}});
      r.rows.push_back({str(ln.t), ln.check, ln.base ? "true" : "false", ln.fibre ? "true" : "false",
                        ln.retained() ? "true" : "false"});
      if (!ln.retained()) r.check("openness:" + ln.check + "(t=" + str(ln.t) + ")", false);
    }
    r.data["openness"] = lines;
    r.check("openness", fam.report.ok());
    if (fam.gauss_manin) {
      const auto& gm = *fam.gauss_manin;
      r.data["gauss_manin"] = {{"step", gm.step}, {"error", gm.error}, {"predicted_norm", gm.predicted_norm}};
      r.check("gauss_manin", gm.error, gm.tolerance);
    }
  });
}

void catalog_cmd(const CommandOptions& o, RunReport& r) {
  const std::vector<double> hs = {0.5, -0.5, 1.0, -1.0, 2.0};
  if (!o.target.empty()) {
    auto l = load(o, r);
    r.data["document"] = serialize(l.entry);
    r.check("operator_identities", operator_identity_residual(l.m, hs), 1e-12);
    return;
  }
  r.model_name = "catalog";
  r.columns = {"name", "dim_real", "fingerprint", "operator_identities", "flags"};
  json entries = json::array();
  for (const auto& e : catalog()) {
    const auto m = build_model(e.presentation);
    const double res = operator_identity_residual(m, hs);
    std::string flags;
    for (const auto& f : e.flags) flags += (flags.empty() ? "" : ",") + f;
    entries.push_back({{"name", e.name}, {"dim_real", e.presentation.dim_real}, {"fingerprint", fingerprint(e.presentation)},
                       {"operator_identities", res}, {"flags", e.flags}});
    r.rows.push_back({e.name, std::to_string(e.presentation.dim_real), fingerprint(e.presentation), str(res), flags});
    r.check("operator_identities:" + e.name, res, 1e-12);
  }
  r.data["entries"] = entries;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"cohomology", "lemma-check", "verify-lemma", "minimal-rep", "structures",
                                                 "audit",      "copolarised", "wp-metrics",   "deform",      "catalog"};
  return names;
}

CatalogEntry resolve_entry(const std::string& target) {
  for (const auto& e : catalog())
    if (e.name == target) return e;
  if (!std::filesystem::is_regular_file(target))
    throw Error(ErrorKind::SchemaError, "'" + target + "' is neither a catalog entry nor a readable file");
  std::ifstream in(target);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_entry_text(ss.str());
}

double operator_identity_residual(const InvariantModel& m, const std::vector<double>& hs) {
  const int n = m.n();
  const K D{K::d}, P{K::del}, Q{K::delbar};
  double res = 0;
  auto upd = [&](const MatC& a) { res = std::max(res, a.size() ? a.norm() : 0.0); };
  for (int k = 0; k + 1 <= 2 * n; ++k) {
    if (k + 2 <= 2 * n) {
      upd(m.total(D, k + 1) * m.total(D, k));
      upd(m.total(P, k + 1) * m.total(P, k));
      upd(m.total(Q, k + 1) * m.total(Q, k));
      upd(m.total(P, k + 1) * m.total(Q, k) + m.total(Q, k + 1) * m.total(P, k));
    }
    for (double h : hs) {
      const K dh{K::d_h, h};
      if (k + 2 <= 2 * n) {
        upd(m.total(dh, k + 1) * m.total(dh, k));
        upd(m.total({K::dh_dminusinvh, h}, k) - (h + 1.0 / h) * m.total({K::deldelbar}, k));
      }
    }
  }
  return res;
}

bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::SchemaError:
    case ErrorKind::DimensionOdd:
    case ErrorKind::RaggedConstants:
    case ErrorKind::JacobiViolation:
    case ErrorKind::NonIntegrable:
    case ErrorKind::NotAlmostComplex:
    case ErrorKind::DegreeOverflow:
    case ErrorKind::DegreeMismatch:
    case ErrorKind::ZeroH:
      return true;
    default:
      return false;
  }
}

RunReport run_command(const CommandOptions& o) {
  RunReport r;
  r.command = o.command;
  r.target = o.target;
  r.seed = o.seed;
  r.flags = {{"seed", o.seed}, {"h", o.hs}, {"p", o.ps}, {"tol", o.tol}};
  if (o.command == "verify-lemma") r.flags["n"] = o.n, r.flags["trials"] = o.trials;
  if (o.command == "deform")
    r.flags["direction"] = o.direction, r.flags["t_max"] = o.t_max, r.flags["steps"] = o.steps,
    r.flags["order"] = o.order, r.flags["family"] = o.family;
  for (double h : o.hs)
    if (h == 0) throw Error(ErrorKind::ZeroH, "--h must be nonzero");
  if (o.command == "cohomology") cohomology_cmd(o, r);
  else if (o.command == "lemma-check") lemma_cmd(o, r);
  else if (o.command == "verify-lemma") verify_lemma_cmd(o, r);
  else if (o.command == "minimal-rep") minimal_rep_cmd(o, r);
  else if (o.command == "structures") structures_cmd(o, r);
  else if (o.command == "audit") audit_cmd(o, r);
  else if (o.command == "copolarised") copolarised_cmd(o, r);
  else if (o.command == "wp-metrics") wp_cmd(o, r);
  else if (o.command == "deform") deform_cmd(o, r);
  else if (o.command == "catalog") catalog_cmd(o, r);
  else throw Error(ErrorKind::SchemaError, "unknown command '" + o.command + "'");
  return r;
}

}  // namespace nh
