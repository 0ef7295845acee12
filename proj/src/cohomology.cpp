#include "nilhodge/cohomology.hpp"

#include <sstream>

namespace nh {

std::string Flavor::name() const {
  std::ostringstream os;
  switch (kind) {
    case DeRham: os << "DeRham(" << k << ")"; break;
    case Dolbeault: os << "Dolbeault(" << p << "," << q << ")"; break;
    case BottChern: os << "BottChern(" << p << "," << q << ")"; break;
    case Aeppli: os << "Aeppli(" << p << "," << q << ")"; break;
    case Dh: os << "Dh(" << k << ",h=" << h << ")"; break;
    case HAeppli: os << "HAeppli(" << k << ",h=" << h << ")"; break;
  }
  return os.str();
}

bool Flavor::operator==(const Flavor& o) const {
  if (kind != o.kind) return false;
  if (total()) return k == o.k && (kind == DeRham || h == o.h);
  return p == o.p && q == o.q;
}

namespace {

MatC hcat(const MatC& a, const MatC& b) {
  MatC r(a.rows(), a.cols() + b.cols());
  r << a, b;
  return r;
}

MatC vcat(const MatC& a, const MatC& b) {
  MatC r(a.rows() + b.rows(), a.cols());
  r << a, b;
  return r;
}

void validate(const InvariantModel& m, const Flavor& f) {
  const int n = m.n();
  if (f.total()) {
    if (f.k < 0 || f.k > 2 * n) throw Error(ErrorKind::DegreeOverflow, "degree outside 0..2n");
    if ((f.kind == Flavor::Dh || f.kind == Flavor::HAeppli) && f.h == 0.0)
      throw Error(ErrorKind::ZeroH, "h must be nonzero");
  } else if (f.p < 0 || f.q < 0 || f.p > n || f.q > n) {
    throw Error(ErrorKind::DegreeOverflow, "bidegree outside the algebra");
  }
}

MatC kernel_of(const MatC& op, int cols) {
  if (op.rows() == 0) return MatC::Identity(cols, cols);
  return kernel(op);
}

// Euclidean witness: a unit vector of `space` orthogonal to `target`.
VecC gap_vector(const MatC& space, const MatC& target) {
  MatC rest = space;
  if (target.cols()) rest -= target * (target.adjoint() * space);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < rest.cols(); ++c)
    if (rest.col(c).norm() > rest.col(best).norm()) best = c;
  return rest.col(best) / rest.col(best).norm();
}

}  // namespace

MatC cocycle_operator(const InvariantModel& m, const Flavor& f) {
  validate(m, f);
  using K = OperatorTag;
  const Bideg b = f.bideg();
  switch (f.kind) {
    case Flavor::DeRham: return m.total({K::d}, f.k);
    case Flavor::Dh: return m.total({K::d_h, f.h}, f.k);
    case Flavor::HAeppli: return m.total({K::dh_dminusinvh, f.h}, f.k);
    case Flavor::Dolbeault: return m.block({K::delbar}, b, {b.p, b.q + 1});
    case Flavor::BottChern:
      return vcat(m.block({K::del}, b, {b.p + 1, b.q}), m.block({K::delbar}, b, {b.p, b.q + 1}));
    case Flavor::Aeppli: return m.block({K::deldelbar}, b, {b.p + 1, b.q + 1});
  }
  return MatC();
}

MatC coboundary_generators(const InvariantModel& m, const Flavor& f) {
  validate(m, f);
  using K = OperatorTag;
  const Bideg b = f.bideg();
  switch (f.kind) {
    case Flavor::DeRham: return m.total({K::d}, f.k - 1);
    case Flavor::Dh: return m.total({K::d_h, f.h}, f.k - 1);
    case Flavor::HAeppli: return hcat(m.total({K::d_h, f.h}, f.k - 1), m.total({K::d_minus_inv_h, f.h}, f.k - 1));
    case Flavor::Dolbeault: return m.block({K::delbar}, {b.p, b.q - 1}, b);
    case Flavor::BottChern: return m.block({K::deldelbar}, {b.p - 1, b.q - 1}, b);
    case Flavor::Aeppli:
      return hcat(m.block({K::del}, {b.p - 1, b.q}, b), m.block({K::delbar}, {b.p, b.q - 1}, b));
  }
  return MatC();
}

bool CohomologyGroup::is_cocycle(const VecC& x, double tol) const {
  return dist_to_span(cocycles, x) <= tol * std::max(1.0, x.norm());
}

bool CohomologyGroup::is_coboundary(const VecC& x, double tol) const {
  return dist_to_span(coboundaries, x) <= tol * std::max(1.0, x.norm());
}

VecC CohomologyGroup::coordinates(const VecC& x) const {
  if (!is_cocycle(x)) throw Error(ErrorKind::NotInSubspace, "form is not a cocycle of " + flavor.name());
  if (dim == 0) return VecC(0);
  const VecC c = pinv_solve(hcat(reps, coboundaries), x);
  return c.head(dim);
}

Form CohomologyGroup::to_form(const VecC& x) const {
  if (flavor.total()) return Form::from_total(n, flavor.k, x);
  return Form::block(n, flavor.bideg(), x);
}

VecC CohomologyGroup::to_vector(const Form& f) const {
  if (flavor.total()) return f.total(flavor.k);
  for (const auto& b : f.degrees())
    if (!(b == flavor.bideg()) && f.component(b).norm() > 1e-12)
      throw Error(ErrorKind::DegreeMismatch, "form has components outside " + flavor.name());
  return f.component(flavor.bideg());
}

CohomologyGroup compute_group(const InvariantModel& m, const Flavor& f, const HermitianMetric* metric) {
  CohomologyGroup g;
  g.flavor = f;
  g.n = m.n();
  const auto& B = basis(m.n());
  const int dim = f.total() ? B.dim_total(f.k) : B.dim(f.bideg());
  g.cocycles = kernel_of(cocycle_operator(m, f), dim);
  g.coboundaries = image(coboundary_generators(m, f));
  if (g.coboundaries.cols() == 0) g.coboundaries = MatC(dim, 0);
  g.dim = static_cast<int>(g.cocycles.cols() - g.coboundaries.cols());
  if (metric) {
    const GramSpace G(f.total() ? metric->gram_total(f.k) : metric->gram(f.bideg()).gram());
    g.reps = G.canonical_basis(G.complement_in(g.cocycles, g.coboundaries));
    g.harmonic = true;
  } else {
    // pivoted complement: echelon basis of Z, kept when independent of B and earlier picks
    const MatC z = g.cocycles.cols() ? MatC(rref(g.cocycles.transpose()).topRows(g.cocycles.cols()).transpose())
                                     : MatC(dim, 0);
    MatC chosen = g.coboundaries;
    std::vector<Eigen::Index> picks;
    int r = rank(chosen);
    for (Eigen::Index c = 0; c < z.cols() && static_cast<int>(picks.size()) < g.dim; ++c) {
      const MatC trial = hcat(chosen, z.col(c));
      const int rt = rank(trial);
      if (rt > r) {
        chosen = trial;
        r = rt;
        picks.push_back(c);
      }
    }
    g.reps = MatC(dim, picks.size());
    for (size_t i = 0; i < picks.size(); ++i) g.reps.col(i) = z.col(picks[i]);
  }
  if (g.reps.cols() != g.dim) throw Error(ErrorKind::InconsistentSystem, "representative count differs from dimension");
  return g;
}

// ------------------------------------------------------------- lemmas

LemmaVerdict check_ddbar(const InvariantModel& m) {
  using K = OperatorTag;
  LemmaVerdict v;
  v.kind = "ddbar";
  const int n = m.n();
  const auto& B = basis(n);
  for (int p = 0; p <= n && v.holds; ++p)
    for (int q = 0; q <= n && v.holds; ++q) {
      const Bideg b{p, q};
      const int k = p + q;
      const MatC Z = kernel_of(vcat(m.block({K::del}, b, {p + 1, q}), m.block({K::delbar}, b, {p, q + 1})), B.dim(b));
      const MatC T = image(m.block({K::deldelbar}, {p - 1, q - 1}, b));
      // d-exact forms of pure type (p,q)
      const MatC D = m.total({K::d}, k - 1);
      MatC Dpq(B.dim(b), D.cols()), Doth(D.rows() - B.dim(b), D.cols());
      Eigen::Index r = 0;
      for (const auto& c : B.bidegrees(k)) {
        if (c == b) Dpq = D.middleRows(B.offset(c), B.dim(c));
        else {
          Doth.middleRows(r, B.dim(c)) = D.middleRows(B.offset(c), B.dim(c));
          r += B.dim(c);
        }
      }
      const MatC Nd = kernel_of(Doth, static_cast<int>(D.cols()));
      const std::vector<std::pair<std::string, MatC>> spaces = {
          {"Im del", image(m.block({K::del}, {p - 1, q}, b))},
          {"Im delbar", image(m.block({K::delbar}, {p, q - 1}, b))},
          {"Im d", image(Dpq * Nd)}};
      for (const auto& [name, U] : spaces) {
        ++v.checks;
        const MatC I = intersect(Z, U);
        if (I.cols() > T.cols()) {
          v.holds = false;
          std::ostringstream os;
          os << "bidegree (" << p << "," << q << "): ker d closed forms in " << name << " exceed Im del delbar ("
             << I.cols() << " > " << T.cols() << ")";
          v.location = os.str();
          v.witness = Form::block(n, b, gap_vector(I, T));
          break;
        }
      }
    }
  return v;
}

LemmaVerdict check_h_ddbar(const InvariantModel& m, double h) {
  using K = OperatorTag;
  if (h == 0.0) throw Error(ErrorKind::ZeroH, "h must be nonzero");
  LemmaVerdict v;
  v.kind = "h_ddbar";
  v.h = h;
  const int n = m.n();
  const auto& B = basis(n);
  for (int k = 0; k <= 2 * n && v.holds; ++k) {
    const MatC Z = kernel_of(vcat(m.total({K::d_h, h}, k), m.total({K::d_minus_inv_h, h}, k)), B.dim_total(k));
    const MatC T = image(m.total({K::deldelbar}, k - 2));
    const std::vector<std::pair<std::string, MatC>> spaces = {
        {"Im d_h", image(m.total({K::d_h, h}, k - 1))},
        {"Im d_{-1/h}", image(m.total({K::d_minus_inv_h, h}, k - 1))},
        {"Im d", image(m.total({K::d}, k - 1))}};
    for (const auto& [name, U] : spaces) {
      ++v.checks;
      const MatC I = intersect(Z, U);
      if (I.cols() > T.cols()) {
        v.holds = false;
        std::ostringstream os;
        os << "degree " << k << ": ker d_h and ker d_{-1/h} forms in " << name << " exceed Im del delbar ("
           << I.cols() << " > " << T.cols() << ")";
        v.location = os.str();
        v.witness = Form::from_total(n, k, gap_vector(I, T));
        break;
      }
    }
  }
  return v;
}

// ------------------------------------------------------------ classes

CohomologyClass class_of(const CohomologyGroup& g, const Form& cocycle) {
  CohomologyClass c;
  c.flavor = g.flavor;
  c.coords = g.coordinates(g.to_vector(cocycle));
  c.rep = cocycle;
  return c;
}

CohomologyClass class_from_coords(const CohomologyGroup& g, const VecC& coords) {
  if (coords.size() != g.dim) throw Error(ErrorKind::DegreeMismatch, "coordinate vector has the wrong length");
  CohomologyClass c;
  c.flavor = g.flavor;
  c.coords = coords;
  c.rep = g.to_form(g.dim ? VecC(g.reps * coords) : VecC::Zero(g.space_dim()));
  return c;
}

Form transfer_representative(const InvariantModel& m, const CohomologyClass& c, const Flavor& target) {
  using K = OperatorTag;
  const Flavor& s = c.flavor;
  const int n = m.n();
  if (s == target) return c.rep;
  auto solve_checked = [](const MatC& A, const VecC& rhs) {
    const VecC x = pinv_solve(A, rhs);
    if ((A * x - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
      throw Error(ErrorKind::InconsistentSystem, "correction equation has no solution");
    return x;
  };
  if (s.kind == Flavor::Dh && target.kind == Flavor::DeRham && s.k == target.k) {
    if (!check_h_ddbar(m, s.h).holds)
      throw Error(ErrorKind::HypothesisFailed, "the h-ddbar-lemma fails; the map to de Rham cohomology is not defined");
    // d(alpha + d_h beta) = 0  <=>  d d_h beta = -d alpha
    const VecC a = c.rep.total(s.k);
    const MatC dh = m.total({K::d_h, s.h}, s.k - 1);
    const MatC d = m.total({K::d}, s.k);
    const VecC beta = solve_checked(d * dh, -(d * a));
    return Form::from_total(n, s.k, a + dh * beta);
  }
  if (s.kind == Flavor::HAeppli && target.kind == Flavor::Dh && s.k == target.k && s.h == target.h) {
    if (!check_h_ddbar(m, s.h).holds)
      throw Error(ErrorKind::HypothesisFailed, "the h-ddbar-lemma fails; the map to d_h cohomology is not defined");
    // d_h(Omega + d_{-1/h} v) = 0  <=>  d_h d_{-1/h} v = -d_h Omega
    const VecC a = c.rep.total(s.k);
    const MatC dm = m.total({K::d_minus_inv_h, s.h}, s.k - 1);
    const MatC dh = m.total({K::d_h, s.h}, s.k);
    const VecC v = solve_checked(dh * dm, -(dh * a));
    return Form::from_total(n, s.k, a + dm * v);
  }
  if (s.kind == Flavor::DeRham && target.kind == Flavor::Dh && s.k == target.k) {
    if (target.h == 0.0) throw Error(ErrorKind::ZeroH, "h must be nonzero");
    return m.apply({K::theta, target.h}, c.rep);
  }
  if (s.kind == Flavor::Dolbeault && target.kind == Flavor::Aeppli && s.p == target.p && s.q == target.q)
    return c.rep;
  if (s.kind == Flavor::DeRham && target.kind == Flavor::Aeppli && target.p + target.q == s.k)
    return c.rep.part(target.bideg());
  throw Error(ErrorKind::NoCanonicalMap, "no canonical map from " + s.name() + " to " + target.name());
}

CohomologyClass transfer_class(const InvariantModel& m, const CohomologyClass& c, const Flavor& target,
                               const HermitianMetric* metric) {
  const Form rep = transfer_representative(m, c, target);
  const CohomologyGroup g = compute_group(m, target, metric);
  return class_of(g, rep);
}

}  // namespace nh
