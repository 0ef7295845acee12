#include "nilhodge/representatives.hpp"

namespace nh {

namespace {

using K = OperatorTag;

void require_ddbar(const InvariantModel& m) {
  if (!check_ddbar(m).holds) throw Error(ErrorKind::LemmaRequired, "the ddbar-lemma fails on this model");
}

void require_h_ddbar(const InvariantModel& m, double h) {
  if (h == 0.0) throw Error(ErrorKind::ZeroH, "h must be nonzero");
  if (!check_h_ddbar(m, h).holds) throw Error(ErrorKind::LemmaRequired, "the h-ddbar-lemma fails on this model");
}

void require_aeppli(const CohomologyClass& cls) {
  if (cls.flavor.kind != Flavor::Aeppli) throw Error(ErrorKind::DegreeMismatch, "expected an Aeppli class");
}

// del delbar x = rhs for x in bidegree `from`, solved in the given norm.
VecC solve_ddbar(const InvariantModel& m, const GramSpace& g, Bideg from, const VecC& rhs) {
  const Bideg to{from.p + 1, from.q + 1};
  if (basis(m.n()).dim(from) == 0) {
    if (rhs.norm() > 1e-10) throw Error(ErrorKind::InconsistentSystem, "no d-closed representative");
    return VecC(0);
  }
  const MatC A = m.block({K::deldelbar}, from, to);
  const VecC x = g.min_norm_solve(A, rhs);
  if ((A * x - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm()))
    throw Error(ErrorKind::InconsistentSystem, "no d-closed representative");
  return x;
}

Form correct_aeppli(const InvariantModel& m, const GramSpace& gphi, const GramSpace& gpsi, const Form& chi,
                    Form* phi_out, Form* psi_out) {
  const int n = m.n();
  const Bideg b = chi.bideg();
  const Bideg bphi{b.p - 1, b.q}, bpsi{b.p, b.q - 1};
  const Form dbar_chi = m.apply({K::delbar}, chi), del_chi = m.apply({K::del}, chi);
  const VecC phi = solve_ddbar(m, gphi, bphi, dbar_chi.component({b.p, b.q + 1}));
  const VecC psi = solve_ddbar(m, gpsi, bpsi, -del_chi.component({b.p + 1, b.q}));
  const Form fphi = phi.size() ? Form::block(n, bphi, phi) : Form::zero(n, b);
  const Form fpsi = psi.size() ? Form::block(n, bpsi, psi) : Form::zero(n, b);
  if (phi_out) *phi_out = fphi;
  if (psi_out) *psi_out = fpsi;
  Form out = chi;
  if (phi.size()) out = out + m.apply({K::del}, fphi).part(b);
  if (psi.size()) out = out + m.apply({K::delbar}, fpsi).part(b);
  return out;
}

void check_same_class(const InvariantModel& m, const Flavor& f, const VecC& diff) {
  const MatC B = image(coboundary_generators(m, f));
  if (dist_to_span(B, diff) > 1e-9 * std::max(1.0, diff.norm()))
    throw Error(ErrorKind::InconsistentSystem, "closed representative left the class");
}

}  // namespace

MinimalRepresentative minimal_d_closed_rep(const HermitianMetric& g, const CohomologyClass& cls) {
  require_aeppli(cls);
  const InvariantModel& m = g.model();
  require_ddbar(m);
  const Bideg b = cls.flavor.bideg();
  const auto grp = compute_group(m, cls.flavor, &g);
  MinimalRepresentative r;
  r.flavor = cls.flavor;
  r.coords = grp.coordinates(grp.to_vector(cls.rep));
  r.chi = grp.to_form(grp.dim ? VecC(grp.reps * r.coords) : VecC::Zero(grp.space_dim()));
  r.chi_min = correct_aeppli(m, g.gram({b.p - 1, b.q}), g.gram({b.p, b.q - 1}), r.chi, &r.phi_min, &r.psi_min);
  r.closed_residual = m.apply({K::d}, r.chi_min).norm();
  if (r.closed_residual > 1e-9 * std::max(1.0, r.chi_min.norm()))
    throw Error(ErrorKind::InconsistentSystem, "minimal representative is not d-closed");
  return r;
}

MinimalRepresentative d_closed_correction(const HermitianMetric& g, const Form& a) {
  const InvariantModel& m = g.model();
  if (!a.pure()) throw Error(ErrorKind::DegreeMismatch, "expected a pure-type form");
  require_ddbar(m);
  const Bideg b = a.bideg();
  const auto grp = compute_group(m, Flavor::aeppli(b.p, b.q));
  MinimalRepresentative r;
  r.flavor = grp.flavor;
  r.coords = grp.coordinates(a.component(b));
  r.chi = a;
  r.chi_min = correct_aeppli(m, g.gram({b.p - 1, b.q}), g.gram({b.p, b.q - 1}), a, &r.phi_min, &r.psi_min);
  r.closed_residual = m.apply({K::d}, r.chi_min).norm();
  if (r.closed_residual > 1e-9 * std::max(1.0, r.chi_min.norm()))
    throw Error(ErrorKind::InconsistentSystem, "corrected form is not d-closed");
  return r;
}

Form closed_rep(const InvariantModel& m, const CohomologyClass& cls, ClosedRepKind kind) {
  const Flavor& f = cls.flavor;
  switch (kind) {
    case ClosedRepKind::AeppliToD: {
      require_aeppli(cls);
      require_ddbar(m);
      const Bideg b = f.bideg();
      const auto& B = basis(m.n());
      const GramSpace e1(MatC::Identity(B.dim({b.p - 1, b.q}), B.dim({b.p - 1, b.q})));
      const GramSpace e2(MatC::Identity(B.dim({b.p, b.q - 1}), B.dim({b.p, b.q - 1})));
      const Form out = correct_aeppli(m, e1, e2, cls.rep, nullptr, nullptr);
      if (m.apply({K::d}, out).norm() > 1e-9 * std::max(1.0, out.norm()))
        throw Error(ErrorKind::InconsistentSystem, "representative is not d-closed");
      check_same_class(m, f, (out - cls.rep).component(b));
      return out;
    }
    case ClosedRepKind::DhToD: {
      if (f.kind != Flavor::Dh) throw Error(ErrorKind::DegreeMismatch, "expected a d_h class");
      require_h_ddbar(m, f.h);
      const Form out = transfer_representative(m, cls, Flavor::de_rham(f.k));
      check_same_class(m, f, (out - cls.rep).total(f.k));
      return out;
    }
    case ClosedRepKind::HAeppliToDh: {
      if (f.kind != Flavor::HAeppli) throw Error(ErrorKind::DegreeMismatch, "expected an h-Aeppli class");
      require_h_ddbar(m, f.h);
      const Form out = transfer_representative(m, cls, Flavor::dh(f.k, f.h));
      check_same_class(m, f, (out - cls.rep).total(f.k));
      return out;
    }
  }
  return cls.rep;
}

}  // namespace nh
