#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nilhodge/hodge.hpp"

using namespace nh;

namespace {

cd ipow(int k) {
  static const cd t[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  return t[((k % 4) + 4) % 4];
}

double fact(int k) { return k <= 1 ? 1.0 : k * fact(k - 1); }

std::vector<HermitianMetric> sample_metrics() {
  std::mt19937_64 rng(17);
  std::vector<HermitianMetric> out;
  out.emplace_back(build_model(fx::torus(2)), MatC::Identity(2, 2));
  out.emplace_back(build_model(fx::torus(3)), fx::random_metric(rng, 3));
  out.emplace_back(build_model(fx::iwasawa()), MatC::Identity(3, 3));
  out.emplace_back(build_model(fx::iwasawa()), fx::random_metric(rng, 3));
  return out;
}

}  // namespace

TEST_CASE("diagonal metric Gram matrix matches the product oracle") {
  const int n = 3;
  MatC h = MatC::Zero(n, n);
  h.diagonal() << 1.0, 2.0, 4.0;
  HermitianMetric g(build_model(fx::torus(n)), h);
  // |phi^a|^2 = 1 / h_aa, products of independent generators multiply
  const auto& B = basis(n);
  for (const Bideg b : {Bideg{1, 0}, Bideg{1, 1}, Bideg{2, 1}}) {
    const MatC G = g.gram(b).gram();
    for (int i = 0; i < B.dim(b); ++i) {
      double expect = 1.0;
      const Mask m = B.mask(b, i);
      for (int a = 0; a < 2 * n; ++a)
        if (m & (Mask(1) << a)) expect /= h(a % n, a % n).real();
      CHECK(std::abs(G(i, i) - expect) < 1e-12);
    }
    CHECK((G - MatC(G.diagonal().asDiagonal())).norm() < 1e-12);
  }
}

TEST_CASE("star of 1 is the normalized volume form") {
  HermitianMetric g(build_model(fx::torus(2)), MatC::Identity(2, 2));
  Form s = g.star(Form::scalar(2, 1.0));
  CHECK((s - g.volume()).norm() < 1e-14);
  CHECK(std::abs(g.integral(g.volume()) - cd(1)) < 1e-14);
  // omega^2/2 = i^2 dz1 dzb1 dz2 dzb2 = dz1 dz2 dzb1 dzb2 for omega = i(dz1 dzb1 + dz2 dzb2)
  CHECK(std::abs(top_coefficient(g.volume()) - cd(1)) < 1e-14);
}

TEST_CASE("inner products agree with the star integral and star squares to a sign") {
  std::mt19937_64 rng(23);
  for (const auto& g : sample_metrics()) {
    const int n = g.n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) {
        for (int t = 0; t < 3; ++t) {
          Form a = fx::random_form(rng, n, {p, q});
          Form b = fx::random_form(rng, n, {p, q});
          const cd lhs = g.inner(a, b);
          const cd rhs = g.integral(wedge(a, g.star(conjugate(b))));
          CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
          CHECK(g.inner(a, a).real() > 0);
          const double sgn = ((p + q) % 2) ? -1.0 : 1.0;
          CHECK((g.star(g.star(a)) - sgn * a).norm() < 1e-10 * a.norm());
        }
      }
  }
}

TEST_CASE("star of primitive forms") {
  std::mt19937_64 rng(29);
  for (const auto& g : sample_metrics()) {
    const int n = g.n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; p + q <= n; ++q) {
        const int k = p + q;
        MatC prim = k < 2 ? MatC::Identity(basis(n).dim({p, q}), basis(n).dim({p, q}))
                          : kernel(wedge_matrix(power(g.omega(), n - k + 1), {p, q}));
        for (Eigen::Index c = 0; c < prim.cols(); ++c) {
          Form a = Form::block(n, {p, q}, prim.col(c));
          CHECK(g.is_primitive(a));
          const double sgn = ((k * (k + 1) / 2) % 2) ? -1.0 : 1.0;
          Form expect = (sgn / fact(n - k)) * (ipow(p - q) * wedge(power(g.omega(), n - k), a));
          CHECK((g.star(a) - expect).norm() < 1e-10);
        }
      }
    // (n-1,1) star criterion on primitive and Lefschetz parts
    Form a = fx::random_form(rng, n, {n - 1, 1});
    auto s = g.lefschetz_split(a);
    CHECK(g.is_primitive(s.prim));
    CHECK(g.is_primitive_star(s.prim));
    CHECK((s.prim + wedge(g.omega(), s.zeta) - a).norm() < 1e-12);
    CHECK((g.star(s.prim) - ipow(n * n + 2 * n - 2) * s.prim).norm() < 1e-10);
    if (s.zeta.norm() > 1e-6) {
      CHECK_FALSE(g.is_primitive(a));
      CHECK_FALSE(g.is_primitive_star(a));
    }
    // primitive part is orthogonal to the Lefschetz part
    CHECK(std::abs(g.inner(s.prim, wedge(g.omega(), s.zeta))) < 1e-10);
  }
}

TEST_CASE("Lefschetz split edge cases") {
  HermitianMetric g(build_model(fx::torus(3)), MatC::Identity(3, 3));
  std::mt19937_64 rng(31);
  Form theta = fx::random_form(rng, 3, {1, 0});
  auto s = g.lefschetz_split(wedge(g.omega(), theta));
  CHECK(s.prim.norm() < 1e-12);
  CHECK((s.zeta - theta).norm() < 1e-12);
  auto s2 = g.lefschetz_split(g.lefschetz_split(fx::random_form(rng, 3, {2, 1})).prim);
  CHECK(s2.zeta.norm() < 1e-12);
  CHECK_THROWS_AS(g.lefschetz_split(fx::random_form(rng, 3, {1, 1})), Error);
}

TEST_CASE("primitivity examples on the torus") {
  HermitianMetric g(build_model(fx::torus(2)), MatC::Identity(2, 2));
  CHECK_FALSE(g.is_primitive(g.omega()));
  // omega ^ (dz1 ^ dzb2) = 0, so the off-diagonal form is primitive
  CHECK(wedge(g.omega(), Form::monomial(2, {1}, {2})).norm() == 0.0);
  CHECK(g.is_primitive(Form::monomial(2, {1}, {2})));
  CHECK(g.is_primitive(Form::monomial(2, {1}, {1}) - Form::monomial(2, {2}, {2})));
  CHECK_FALSE(g.is_primitive(Form::monomial(2, {1}, {1})));
  CHECK_FALSE(g.is_primitive(Form::monomial(2, {1, 2}, {1})));
}

TEST_CASE("adjoints: Gram construction agrees with the star identities") {
  std::mt19937_64 rng(37);
  for (const auto& g : sample_metrics()) {
    const int n = g.n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q)
        for (auto k : {OperatorTag::del, OperatorTag::delbar, OperatorTag::deldelbar}) {
          const MatC a = g.adjoint(k, {p, q});
          const MatC b = g.adjoint_star(k, {p, q});
          CHECK((a - b).norm() < 1e-10 * std::max(1.0, a.norm()));
        }
    // <del a, b> = <a, del^* b>
    for (int t = 0; t < 50; ++t) {
      std::uniform_int_distribution<int> d(0, n - 1), e(0, n);
      const Bideg bd{d(rng), e(rng)};
      Form a = fx::random_form(rng, n, bd);
      Form b = fx::random_form(rng, n, {bd.p + 1, bd.q});
      Form da = g.model().apply({OperatorTag::del}, a);
      Form sb = Form::block(n, bd, g.adjoint(OperatorTag::del, bd) * b.component({bd.p + 1, bd.q}));
      CHECK(std::abs(g.inner(da, b) - g.inner(a, sb)) < 1e-10);
    }
  }
  HermitianMetric t(build_model(fx::torus(2)), MatC::Identity(2, 2));
  CHECK(t.adjoint(OperatorTag::del, {0, 1}).norm() == 0.0);
}

TEST_CASE("Laplacians: positivity and kernel characterizations") {
  for (const auto& g : sample_metrics()) {
    const int n = g.n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q)
        for (auto f : {LaplacianFlavor::Aeppli, LaplacianFlavor::BottChern, LaplacianFlavor::Dolbeault}) {
          const MatC L = g.laplacian(f, {p, q});
          const MatC GL = g.gram({p, q}).gram() * L;
          CHECK((GL - GL.adjoint()).norm() < 1e-10 * std::max(1.0, GL.norm()));
          Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (GL + GL.adjoint()));
          CHECK(es.eigenvalues().minCoeff() > -1e-10);
          CHECK(g.harmonic_basis(f, {p, q}).cols() == g.triple_kernel(f, {p, q}).cols());
        }
  }
}

TEST_CASE("harmonic dimensions on the torus and Iwasawa") {
  HermitianMetric t(build_model(fx::torus(2)), MatC::Identity(2, 2));
  CHECK(t.harmonic_basis(LaplacianFlavor::Aeppli, {1, 1}).cols() == 4);
  HermitianMetric iw(build_model(fx::iwasawa()), MatC::Identity(3, 3));
  CHECK(iw.harmonic_basis(LaplacianFlavor::BottChern, {1, 0}).cols() == 2);
}

TEST_CASE("star carries Aeppli harmonics onto Bott-Chern harmonics") {
  for (const auto& g : sample_metrics()) {
    const int n = g.n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) {
        const MatC HA = g.harmonic_basis(LaplacianFlavor::Aeppli, {p, q});
        const MatC HB = g.harmonic_basis(LaplacianFlavor::BottChern, {n - q, n - p});
        CHECK(HA.cols() == HB.cols());
        const MatC L = g.laplacian(LaplacianFlavor::BottChern, {n - q, n - p});
        for (Eigen::Index c = 0; c < HA.cols(); ++c)
          CHECK((L * (g.star_matrix({p, q}) * HA.col(c))).norm() < 1e-9);
      }
  }
}

TEST_CASE("three-space decompositions") {
  std::mt19937_64 rng(41);
  for (const auto& g : sample_metrics()) {
    const int n = g.n();
    for (auto f : {LaplacianFlavor::Aeppli, LaplacianFlavor::BottChern}) {
      for (int t = 0; t < 50; ++t) {
        std::uniform_int_distribution<int> d(0, n);
        const Bideg b{d(rng), d(rng)};
        Form a = fx::random_form(rng, n, b);
        ThreeSpace s = g.three_space(f, a);
        CHECK((s.harmonic + s.exact + s.coexact - a).norm() < 1e-12 * std::max(1.0, a.norm()) * 100);
        CHECK(std::abs(g.inner(s.harmonic, s.exact)) < 1e-10);
        CHECK(std::abs(g.inner(s.harmonic, s.coexact)) < 1e-10);
        CHECK(std::abs(g.inner(s.exact, s.coexact)) < 1e-10);
      }
      // harmonic inputs are fixed
      const MatC H = g.harmonic_basis(f, {1, 1});
      if (H.cols()) {
        Form a = Form::block(n, {1, 1}, H.col(0));
        ThreeSpace s = g.three_space(f, a);
        CHECK((s.harmonic - a).norm() < 1e-12);
        CHECK(s.exact.norm() < 1e-12);
        CHECK(s.coexact.norm() < 1e-12);
      }
    }
  }
  HermitianMetric iw(build_model(fx::iwasawa()), MatC::Identity(3, 3));
  Form x = iw.model().apply({OperatorTag::delbar}, fx::random_form(rng, 3, {1, 2}));
  ThreeSpace s = iw.three_space(LaplacianFlavor::Aeppli, x);
  CHECK(s.harmonic.norm() < 1e-12);
  CHECK(s.coexact.norm() < 1e-12);
}
