#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nilhodge/catalog.hpp"
#include "nilhodge/structures.hpp"

using namespace nh;

namespace {

using K = OperatorTag;
const cd kI(0, 1);

Form metric_form(const MatC& h) { return form_from_one_one(static_cast<int>(h.rows()), kI * h); }

double min_eig_of(const MatC& X) {
  Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (X + X.adjoint()));
  return es.eigenvalues()(0);
}

double fact(int k) { return k <= 1 ? 1.0 : k * fact(k - 1); }

std::vector<StructureKind> all_kinds(int n) {
  std::vector<StructureKind> out = {StructureKind::gauduchon(), StructureKind::balanced(), StructureKind::sg()};
  for (double h : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    out.push_back(StructureKind::hsg(h));
    out.push_back(StructureKind::h_gauduchon(h));
  }
  return out;
}

}  // namespace

TEST_CASE("torus standard metric satisfies every structure with zero auxiliary components") {
  for (int n : {2, 3}) {
    const auto m = build_model(fx::torus(n));
    const Form w = metric_form(MatC::Identity(n, n));
    for (const auto& k : all_kinds(n)) {
      const auto c = check_structure(m, w, k);
      CHECK(c.certified);
      for (const auto& [name, f] : c.witnesses)
        if (name.rfind("aux", 0) == 0) CHECK(f.norm() < 1e-12);
    }
    for (int p = 1; p < n; ++p) {
      const Form Om = power(w, p);
      CHECK(check_structure(m, Om, StructureKind::pskt(p)).certified);
      CHECK(check_structure(m, Om, StructureKind::phs(p)).certified);
      CHECK(check_structure(m, Om, StructureKind::hphs(p, 2.0)).certified);
    }
  }
}

TEST_CASE("catalog metric checks match direct evaluation") {
  {
    const auto& e = catalog_entry("fou");
    const auto m = build_model(e.presentation);
    const Form w = metric_form(e.metric);
    const auto c = check_structure(m, w, StructureKind::balanced());
    CHECK(c.certified);
    CHECK(c.residuals.at("condition") <= 1e-10);
    // not Kahler: d omega != 0
    CHECK(m.apply({K::d}, w).norm() > 0.1);
  }
  {
    // Iwasawa diagonal metric: del delbar omega^2 = 0 by expansion
    const auto m = build_model(catalog_entry("iwasawa").presentation);
    MatC h = MatC::Zero(3, 3);
    h.diagonal() << 1.0, 2.0, 0.5;
    const Form w = metric_form(h);
    CHECK(m.apply({K::deldelbar}, power(w, 2)).norm() < 1e-12);
    CHECK(check_structure(m, w, StructureKind::gauduchon()).certified);
  }
  {
    // Kodaira-Thurston: omega^{n-1} = omega is not closed
    const auto m = build_model(catalog_entry("kodaira_thurston").presentation);
    CHECK_FALSE(check_structure(m, metric_form(MatC::Identity(2, 2)), StructureKind::balanced()).certified);
  }
}

TEST_CASE("check_structure rejects invalid candidates") {
  const auto m = build_model(fx::torus(3));
  auto kind_of = [&](const Form& f, const StructureKind& k) {
    try {
      check_structure(m, f, k);
    } catch (const Error& e) {
      return e.kind;
    }
    return ErrorKind::SchemaError;
  };
  MatC h = MatC::Identity(3, 3);
  h(2, 2) = -1;
  CHECK(kind_of(metric_form(h), StructureKind::gauduchon()) == ErrorKind::NotPositive);
  CHECK(kind_of(Form::monomial(3, {1}, {2}), StructureKind::gauduchon()) == ErrorKind::NotReal);
  CHECK(kind_of(Form::monomial(3, {1, 2}, {}), StructureKind::gauduchon()) == ErrorKind::DegreeMismatch);
  CHECK(kind_of(metric_form(MatC::Identity(3, 3)), StructureKind::pskt(2)) == ErrorKind::DegreeMismatch);
}

TEST_CASE("Gauduchon and h-Gauduchon verdicts coincide") {
  std::mt19937_64 rng(3);
  for (const char* name : {"iwasawa", "fou", "nakamura", "kodaira_thurston"}) {
    const auto m = build_model(catalog_entry(name).presentation);
    const int n = m.n();
    for (int t = 0; t < 6; ++t) {
      const Form w = metric_form(fx::random_metric(rng, n));
      const bool g = check_structure(m, w, StructureKind::gauduchon()).certified;
      for (double h : {-2.0, -0.5, 0.5, 1.0, 2.0, 3.3}) CHECK(check_structure(m, w, StructureKind::h_gauduchon(h)).certified == g);
    }
  }
}

TEST_CASE("theta scaling turns d-closed sG data into d_h-closed data") {
  // d(conj X + w + X) = 0 implies d_h((1/h) conj X + w + h X) = 0, as a matrix identity on (n,n-2) inputs
  const auto m = build_model(catalog_entry("fou").presentation);
  std::mt19937_64 rng(8);
  const auto sg = find_structure(m, StructureKind::sg());
  REQUIRE(sg.status == SearchStatus::Found);
  const Form X = sg.cert->witnesses.at("aux(3,1)");
  const Form w = sg.cert->witnesses.at("omega^{n-1}");
  CHECK(m.apply({K::d}, conjugate(X) + w + X).norm() < 1e-9);
  for (double h : {-2.0, -0.5, 0.5, 2.0, 5.0})
    CHECK(m.apply({K::d_h, h}, (1.0 / h) * conjugate(X) + w + h * X).norm() < 1e-9);
}

TEST_CASE("positivity matrix of omega^{n-1} is the scaled inverse transpose") {
  std::mt19937_64 rng(5);
  for (int n : {3, 4}) {
    const MatC h = fx::random_metric(rng, n);
    const MatC M = positivity_matrix(power(metric_form(h), n - 1));
    const MatC expect = fact(n - 1) * h.determinant() * MatC(h.inverse()).transpose();
    CHECK((M - expect).norm() < 1e-9 * expect.norm());
    // inverse map
    CHECK((form_from_positivity(n, M) - power(metric_form(h), n - 1)).norm() < 1e-9);
  }
}

TEST_CASE("Michelsohn root recovers the metric") {
  const auto m = build_model(fx::torus(3));
  const Form w0 = metric_form(MatC::Identity(3, 3));
  {
    const auto r = michelsohn_root(m, power(w0, 2));
    CHECK((r.omega - w0).norm() < 1e-12);
  }
  {
    const auto r = michelsohn_root(m, power(2.0 * w0, 2));
    CHECK((r.omega - 2.0 * w0).norm() < 1e-10);
  }
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    // random positive (2,2)-form that is not a power
    const Form Om = power(metric_form(fx::random_metric(rng, 3)), 2) + power(metric_form(fx::random_metric(rng, 3)), 2);
    const auto r = michelsohn_root(m, Om);
    CHECK((power(r.omega, 2) - Om).norm() <= 1e-9);
    CHECK(r.uniqueness_gap <= 1e-8);
    CHECK(min_eig_of(one_one_matrix(r.omega) / kI) > 0);
  }
  MatC bad = MatC::Identity(3, 3);
  bad(0, 0) = -1;
  CHECK_THROWS_AS(michelsohn_root(m, form_from_positivity(3, bad)), Error);
}

TEST_CASE("structure search on catalog entries") {
  for (const auto& e : catalog()) {
    const auto m = build_model(e.presentation);
    const auto g = find_structure(m, StructureKind::gauduchon());
    CHECK(g.status == SearchStatus::Found);
    REQUIRE(g.cert);
    CHECK(g.cert->certified);
  }
  {
    const auto m = build_model(catalog_entry("fou").presentation);
    const auto r = find_structure(m, StructureKind::hphs(2, 2.0));
    REQUIRE(r.status == SearchStatus::Found);
    // h not in {1,-1}: the witness is balanced with vanishing auxiliary part
    const auto root = michelsohn_root(m, r.cert->candidate);
    CHECK(check_structure(m, root.omega, StructureKind::balanced()).certified);
    Form total = r.cert->candidate;
    for (const auto& [name, f] : r.cert->witnesses)
      if (name.rfind("aux", 0) == 0) total = total + f;
    CHECK(m.apply({K::d_h, 2.0}, total).norm() < 1e-9);
  }
  {
    // no invariant SKT metric on the Iwasawa algebra: dual certificate
    const auto m = build_model(catalog_entry("iwasawa").presentation);
    const auto r = find_structure(m, StructureKind::pskt(1));
    CHECK(r.status == SearchStatus::NotFoundConclusive);
    REQUIRE(r.dual);
    CHECK(min_eig_of(*r.dual) >= -1e-9);
    CHECK(r.dual->norm() > 0.1);
  }
  {
    // Kodaira-Thurston has no balanced metric
    const auto m = build_model(catalog_entry("kodaira_thurston").presentation);
    CHECK(find_structure(m, StructureKind::balanced()).status == SearchStatus::NotFoundConclusive);
    CHECK(find_structure(m, StructureKind::pskt(1)).status == SearchStatus::Found);
  }
}

TEST_CASE("sampled search handles intermediate p") {
  const auto m = build_model(fx::torus(4));
  const auto r = find_structure(m, StructureKind::pskt(2), 20, 3);
  CHECK(r.status == SearchStatus::Found);
  REQUIRE(r.cert);
  CHECK_FALSE(r.cert->exact_positivity);
  CHECK(r.cert->positivity.front() > kPositivityMargin);
}

TEST_CASE("equivalence audit passes on every catalog entry") {
  for (const auto& e : catalog()) {
    const auto m = build_model(e.presentation);
    const auto rep = audit_equivalences(m, {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}, {1, m.n() - 1});
    for (const auto& l : rep.lines) {
      INFO(e.name << " " << l.check << " h=" << l.h << " p=" << l.p << " " << l.detail);
      CHECK(l.status != "disagree");
      CHECK(l.status != "failed");
    }
  }
}
