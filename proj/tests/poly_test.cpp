#include <doctest.h>

#include <cmath>

#include "almgren/poly.hpp"
#include "builders.hpp"
#include "oracles.hpp"

using namespace almgren;
using builders::var;

TEST_CASE("laplacian: direct differentiation") {
  // x^2 + y^2 -> 4
  ExactPoly p = var(2, 0) * var(2, 0) + var(2, 1) * var(2, 1);
  CHECK(laplacian(p) == ExactPoly::constant(2, Rational(4)));
  // harmonic identity x^2 - y^2 -> 0
  CHECK(laplacian(builders::sq_diff(2, 0, 1)).is_zero());
}

TEST_CASE("laplacian: 2 r^3 sin(3 theta) = 6x^2 y - 2y^3 is harmonic") {
  ExactPoly p(2);
  p += var(2, 0) * var(2, 0) * var(2, 1) * Rational(6);
  p -= var(2, 1) * var(2, 1) * var(2, 1) * Rational(2);
  CHECK(laplacian(p).is_zero());
  // independent finite-difference oracle at a few points
  auto f = [&](const std::vector<double>& x) { return p.eval(x); };
  std::vector<std::vector<double>> pts = {{0.3, 0.4}, {-0.7, 0.2}, {0.1, -0.9}};
  for (const auto& pt : pts) {
    CHECK(std::fabs(oracles::fd_laplacian(f, pt)) < 1e-4);
  }
}

TEST_CASE("sphere_average_monomial: closed forms against quadrature oracle") {
  // avg x_1^2 = 1/n by symmetry
  for (int n = 2; n <= 5; ++n) {
    Monomial m(std::vector<uint32_t>(n, 0));
    m.exps[0] = 2;
    CHECK(sphere_average_monomial(m, n) == Rational(1, n));
  }
  // avg x^4 on the circle: quadrature of cos^4 gives 3/8
  {
    auto mc = oracles::mc_sphere_average(
        [](const std::vector<double>& x) { return std::pow(x[0], 4); }, 2, 200000, 7);
    CHECK(std::fabs(mc.mean - 0.375) <= 3 * mc.stderr_);
    CHECK(sphere_average_monomial(Monomial({4, 0}), 2) == Rational(3, 8));
  }
  // avg x^2 y^2 on S^2 = 1/15
  {
    auto mc = oracles::mc_sphere_average(
        [](const std::vector<double>& x) { return x[0] * x[0] * x[1] * x[1]; }, 3, 200000, 8);
    CHECK(std::fabs(mc.mean - 1.0 / 15) <= 3 * mc.stderr_);
    CHECK(sphere_average_monomial(Monomial({2, 2, 0}), 3) == Rational(1, 15));
  }
  // odd exponent kills the average
  CHECK(sphere_average_monomial(Monomial({1, 2}), 2) == 0);
}

TEST_CASE("sphere_average_monomial: 50 random multi-indices vs Monte Carlo") {
  Rng rng(1234);
  int checked = 0;
  while (checked < 50) {
    int n = rng.uniform_int(2, 5);
    Monomial m(std::vector<uint32_t>(n, 0));
    int total = 0;
    for (int i = 0; i < n; ++i) {
      int e = rng.uniform_int(0, 4);
      if (total + e > 8) e = 0;
      m.exps[i] = e;
      total += e;
    }
    Rational exact = sphere_average_monomial(m, n);
    auto mc = oracles::mc_sphere_average(
        [&](const std::vector<double>& x) {
          double v = 1;
          for (int i = 0; i < n; ++i) {
            for (uint32_t k = 0; k < m.exps[i]; ++k) v *= x[i];
          }
          return v;
        },
        n, 40000, 1000 + checked);
    CHECK(std::fabs(to_double(exact) - mc.mean) <= 3 * mc.stderr_ + 1e-12);
    ++checked;
  }
}

TEST_CASE("inner: symmetry, orthogonality, positivity") {
  // <x1, x1> = 1/n, so sqrt(n) x1 has unit norm
  for (int n = 2; n <= 4; ++n) {
    CHECK(inner(var(n, 0), var(n, 0)) == Rational(1, n));
    CHECK(inner(var(n, 0), var(n, 1)) == 0);
  }
  CHECK(inner(var(3, 0) * var(3, 1), var(3, 0) * var(3, 1)) == Rational(1, 15));
  CHECK_THROWS(inner(var(2, 0), var(3, 0)));

  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    int n = rng.uniform_int(2, 4);
    ExactPoly f(n), g(n);
    for (int t = 0; t < 5; ++t) {
      Monomial m(std::vector<uint32_t>(n, 0));
      for (int i = 0; i < n; ++i) m.exps[i] = rng.uniform_int(0, 2);
      f.add_term(m, Rational(rng.uniform_int(-3, 3)));
      Monomial m2(std::vector<uint32_t>(n, 0));
      for (int i = 0; i < n; ++i) m2.exps[i] = rng.uniform_int(0, 2);
      g.add_term(m2, Rational(rng.uniform_int(-3, 3)));
    }
    CHECK(inner(f, g) == inner(g, f));
    // bilinearity
    CHECK(inner(f + g, g) == inner(f, g) + inner(g, g));
    if (!f.is_zero()) CHECK(inner(f, f) > 0);
  }
}

TEST_CASE("shift: Taylor re-expansion") {
  // (x + 1)^2
  ExactPoly p = var(2, 0) * var(2, 0);
  ExactPoly s = shift(p, {Rational(1), Rational(0)});
  ExactPoly want = var(2, 0) * var(2, 0) + var(2, 0) * Rational(2) +
                   ExactPoly::constant(2, Rational(1));
  CHECK(s == want);
  // zero shift is the identity
  ExactPoly q = builders::re_zd(5);
  CHECK(shift(q, {Rational(0), Rational(0)}) == q);
}

TEST_CASE("shift: 2-variable graded parts match the binomial formula") {
  // P_d((t,0) + .) = P_d + sum_k C(d,k) t^k P_{d-k} with P_k = 2 r^k sin(k t)
  for (int d : {3, 5}) {
    Rational t(2, 3);
    ExactPoly Pd = basis_2d(d).elements[0];
    ExactPoly moved = shift(Pd, {t, Rational(0)});
    auto parts = moved.graded_parts();
    for (int k = 1; k <= d; ++k) {
      if (d - k >= 1) {
        ExactPoly want = basis_2d(d - k).elements[0] * (binomial(d, k) * pow_rational(t, k));
        REQUIRE(parts.count(d - k));
        CHECK(parts.at(d - k) == want);
      } else {
        // degree-0 part of the sine family vanishes: P_d(t, 0) = 0
        CHECK(parts.count(0) == 0);
      }
    }
    CHECK(parts.at(d) == Pd);
  }
}

TEST_CASE("partial: exact derivatives") {
  CHECK(partial(var(2, 0) * var(2, 1), 0) == var(2, 1));
  CHECK(partial(ExactPoly::constant(2, Rational(5)), 0).is_zero());
  // d_x P_d = 2 d r^{d-1} sin((d-1) theta) for d = 3
  ExactPoly P3 = basis_2d(3).elements[0];
  CHECK(partial(P3, 0) == basis_2d(2).elements[0] * Rational(3));
}

TEST_CASE("laplacian commutes with shift, exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    int n = rng.uniform_int(2, 3);
    ExactPoly p(n);
    for (int t = 0; t < 6; ++t) {
      Monomial m(std::vector<uint32_t>(n, 0));
      for (int i = 0; i < n; ++i) m.exps[i] = rng.uniform_int(0, 3);
      p.add_term(m, Rational(rng.uniform_int(-4, 4)));
    }
    std::vector<Rational> xb;
    for (int i = 0; i < n; ++i) xb.emplace_back(rng.uniform_int(-2, 2), rng.uniform_int(1, 3));
    CHECK(laplacian(shift(p, xb)) == shift(laplacian(p), xb));
  }
}

TEST_CASE("hhPs of different degrees are exactly orthogonal") {
  using namespace builders;
  for (int d1 = 1; d1 <= 4; ++d1) {
    for (int d2 = d1 + 1; d2 <= 5; ++d2) {
      CHECK(inner(re_zd(d1), re_zd(d2)) == 0);
      CHECK(inner(im_zd(d1), re_zd(d2)) == 0);
    }
  }
  // and in n = 3 via embedded families
  CHECK(inner(embed_2d(re_zd(2), 3), embed_2d(re_zd(3), 3)) == 0);
}

TEST_CASE("make_primitive: integer content one, positive leading coefficient") {
  ExactPoly p = var(2, 0) * Rational(-4, 6) + var(2, 1) * Rational(-2, 3);
  ExactPoly q = p;
  Rational mult = q.make_primitive();
  CHECK(q == p * mult);
  CHECK(q.terms().rbegin()->second > 0);
  Integer den_lcm(1);
  for (const auto& [m, c] : q.terms()) CHECK(c.get_den() == 1);
}
