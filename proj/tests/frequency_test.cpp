#include <doctest.h>

#include <cmath>
#include <functional>

#include "almgren/expansion.hpp"
#include "almgren/field.hpp"
#include "builders.hpp"
#include "oracles.hpp"

using namespace almgren;
using builders::expansion_re_zd;
using builders::random_expansion;

namespace {

// two unit-coefficient terms at the given degrees (equal masses)
Expansion two_term(int n, int d1, int d2) {
  Expansion e(n);
  ExactPoly p1 = n == 2 ? builders::re_zd(d1) : builders::embed_2d(builders::re_zd(d1), n);
  ExactPoly p2 = n == 2 ? builders::im_zd(d2) : builders::embed_2d(builders::im_zd(d2), n);
  e.add_term(d1, p1, Rational(1));
  e.add_term(d2, p2, Rational(1));
  return e;
}

Rational approx(double x) { return rational_from_double(x); }

}  // namespace

TEST_CASE("height: closed form and quadrature oracle") {
  // a_1 = 1 only: h(r) = a_1^2 r^2
  Expansion e(2);
  e.add_term(1, builders::re_zd(1), Rational(1));  // re_zd(1) = x, norm2 = 1/2
  Rational a2 = e.coeff2(1);
  CHECK(a2 == Rational(1, 2));
  CHECK(height(e, Rational(3, 2)) == a2 * Rational(9, 4));

  // two masses at r = 1 add up
  Expansion e2(2);
  e2.add_term(1, builders::re_zd(1), Rational(2));  // a_1^2 = 4 * 1/2 = 2
  e2.add_term(3, builders::im_zd(3), Rational(1));  // a_3^2 = 1/2
  CHECK(height(e2, Rational(1)) == Rational(5, 2));

  // random expansion vs Monte-Carlo sphere integration of u^2
  Expansion r = random_expansion(3, 4, 2024);
  double want = to_double(height(r, Rational(7, 10)));
  auto mc = oracles::mc_sphere_average(
      [&](const std::vector<double>& x) {
        std::vector<double> y(3);
        for (int i = 0; i < 3; ++i) y[i] = 0.7 * x[i];
        double u = r.eval_local(y);
        return u * u;
      },
      3, 60000, 555);
  CHECK(std::fabs(want - mc.mean) <= 3 * mc.stderr_ + 1e-12);
}

TEST_CASE("freq: exact rational values") {
  for (int d : {1, 2, 5}) {
    Expansion e = expansion_re_zd(d);
    for (int num = 1; num <= 4; ++num) {
      CHECK(freq(e, Rational(num, 3)) == Rational(d));
    }
  }
  {
    Expansion e(2);
    e.add_term(1, builders::re_zd(1), Rational(1));
    e.add_term(2, builders::re_zd(2), Rational(1));
    CHECK(freq(e, Rational(1)) == Rational(3, 2));
  }
  // a_d = a_{d+1}: N(r) = d + r^2/(1+r^2), exact at rational radii
  {
    int d = 3;
    Expansion e = two_term(2, d, d + 1);
    for (Rational r : {Rational(1, 2), Rational(1), Rational(5, 4)}) {
      Rational r2 = r * r;
      CHECK(freq(e, r) == Rational(d) + r2 / (1 + r2));
    }
  }
  CHECK_THROWS_AS(freq(Expansion(2), Rational(1)), UndefinedFrequency);
}

TEST_CASE("freq_at: recentring") {
  CHECK(freq_at(expansion_re_zd(4), {Rational(0), Rational(0)}, Rational(1, 2)) == 4);
  // u = x^2 - y^2 at (1,0): vanishing order 1, so N -> 1 as r -> 0
  {
    Expansion e(2);
    e.add_term(2, builders::re_zd(2), Rational(1));
    std::vector<Rational> x{Rational(1), Rational(0)};
    Rational small = freq_at(e, x, Rational(1, 1000));
    CHECK(to_double(small) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(freq_at(e, x, Rational(1)) > small);
  }
  // u = Re(z^3) at (1,0): N(0+) = 1, increasing toward 3
  {
    Expansion e = expansion_re_zd(3);
    std::vector<Rational> x{Rational(1), Rational(0)};
    Rational prev = freq_at(e, x, Rational(1, 1000));
    CHECK(to_double(prev) == doctest::Approx(1.0).epsilon(1e-4));
    for (Rational r : {Rational(1), Rational(10), Rational(1000)}) {
      Rational cur = freq_at(e, x, r);
      CHECK(cur >= prev);
      prev = cur;
    }
    CHECK(to_double(prev) == doctest::Approx(3.0).epsilon(1e-4));
  }
}

TEST_CASE("tangent_map: scale invariance and the blow-up identity") {
  {
    Expansion e = expansion_re_zd(3);
    Expansion T = tangent_map(e, {Rational(0), Rational(0)}, Rational(1, 4));
    CHECK(height_centered(T, Rational(1)) == 1);
    auto a = e.unit_term(3), b = T.unit_term(3);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->first == b->first);
    CHECK(a->second == b->second);
  }
  // N_u(x, r s) = N_T(0, s), exact, on random data
  {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      Expansion e = random_expansion(2, 5, 1000 + trial);
      if (e.is_constant()) continue;
      std::vector<Rational> x{Rational(rng.uniform_int(-3, 3), 8),
                              Rational(rng.uniform_int(-3, 3), 8)};
      for (auto& c : x) c.canonicalize();
      Rational r(rng.uniform_int(1, 8), 8);
      r.canonicalize();
      Rational s(rng.uniform_int(1, 16), 8);
      s.canonicalize();
      Expansion shifted = shift_expansion(e, x);
      if (shifted.is_constant()) continue;
      Expansion T = tangent_map(e, x, r);
      CHECK(freq(T, s) == freq(shifted, r * s));
    }
  }
  // two-term blow-up masses scale like (r^2, r^4), renormalized
  {
    Expansion e = two_term(2, 1, 2);
    Expansion T = tangent_map(e, {Rational(0), Rational(0)}, Rational(1, 2));
    Rational m1 = T.coeff2(1), m2 = T.coeff2(2);
    CHECK(m1 / m2 == Rational(4));
    CHECK(m1 + m2 == 1);
  }
}

TEST_CASE("pinch: nonnegative, closed forms") {
  CHECK(pinch(expansion_re_zd(4), {Rational(0), Rational(0)}, Rational(1, 4),
              Rational(1)) == 0);
  {
    Expansion e = two_term(2, 2, 3);
    Rational re = approx(1.0 / M_E);
    double delta = to_double(pinch(e, {Rational(0), Rational(0)}, re, Rational(1)));
    double em2 = to_double(re) * to_double(re);
    CHECK(delta == doctest::Approx(0.5 - em2 / (1 + em2)).epsilon(1e-12));
  }
  for (int trial = 0; trial < 10; ++trial) {
    Expansion e = random_expansion(3, 5, 50 + trial);
    if (e.is_constant()) continue;
    CHECK(pinch(e, {Rational(0), Rational(0), Rational(0)}, Rational(1, 8),
                Rational(2)) >= 0);
  }
}

TEST_CASE("pinch_ode_check: sharp equality and exact inequality corpus") {
  {
    Expansion e = two_term(2, 3, 4);
    auto c = pinch_ode_check(e, Rational(1));
    CHECK(c.eps == Rational(1, 2));
    CHECK(c.lhs == Rational(1, 2));
    CHECK(c.rhs == Rational(1, 2));
  }
  {
    auto c = pinch_ode_check(expansion_re_zd(5), Rational(2, 3));
    CHECK(c.eps == 0);
    CHECK(c.lhs == 0);
    CHECK(c.rhs == 0);
  }
  for (int trial = 0; trial < 100; ++trial) {
    Expansion e = random_expansion(2, 6, 7000 + trial);
    if (e.is_constant()) continue;
    for (int j = 1; j <= 10; ++j) {
      auto c = pinch_ode_check(e, Rational(j, 5));
      CHECK(c.lhs >= c.rhs);
    }
  }
}

TEST_CASE("dominant_degree: the dichotomy never fails") {
  for (double eps : {1e-1, 1e-3}) {
    auto out = dominant_degree(expansion_re_zd(4), Rational(1), eps);
    CHECK(out.dominant);
    CHECK(out.degree == 4);
  }
  {
    Expansion e = two_term(2, 2, 3);
    auto out = dominant_degree(e, Rational(1), 1e-3);
    CHECK(out.frequency_drop);
    CHECK(out.drop >= 1e-3);
  }
  for (int trial = 0; trial < 200; ++trial) {
    Expansion e = random_expansion(2, 6, 9000 + trial);
    if (e.is_constant()) continue;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      CHECK_NOTHROW(dominant_degree(e, Rational(1, 2), eps));
    }
  }
}

TEST_CASE("tangent_uniqueness_check: constructed pinches meet the constants") {
  {
    Expansion e = expansion_re_zd(3);
    auto rep = tangent_uniqueness_check(e, approx(std::exp(-3.0) * 0.99), Rational(1),
                                        1e-3, 1e-3);
    CHECK(rep.d == 3);
    CHECK(rep.freq_dev_ok);
    CHECK(rep.mass_ok);
    CHECK(rep.l2_ok);
    CHECK(rep.grad_ok);
    CHECK(rep.unique);
    CHECK(rep.max_freq_dev == 0);
    CHECK(rep.max_l2_dist == doctest::Approx(0.0));
  }
  // P_d + t P_{d+1} with t^2 ~ eps: pinch over (e^-3, 1) stays <= eps
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    int d = 2;
    Expansion e(2);
    e.add_term(d, builders::re_zd(d), Rational(1));
    e.add_term(d + 1, builders::im_zd(d + 1), approx(std::sqrt(eps)));
    Rational r2 = approx(std::exp(-3.0) * 0.999);
    auto rep = tangent_uniqueness_check(e, r2, Rational(1), eps, 1e-2);
    CHECK(rep.d == d);
    CHECK(rep.freq_dev_ok);
    CHECK(rep.mass_ok);
    CHECK(rep.l2_ok);
    CHECK(rep.grad_ok);
    CHECK(rep.unique);
  }
  CHECK_THROWS(tangent_uniqueness_check(expansion_re_zd(2), Rational(1, 2), Rational(1),
                                        1e-3, 1e-3));
}

TEST_CASE("uniform_bound_check: empirical constants stay bounded") {
  {
    auto c = uniform_bound_check(expansion_re_zd(4), 0.5, 0.5, 128);
    CHECK(c.base_freq == doctest::Approx(4.0));
    CHECK(c.ratio <= 1.0 + 1e-9);
  }
  {
    Expansion lin(2);
    lin.add_term(1, builders::re_zd(1), Rational(1));
    auto c = uniform_bound_check(lin, 0.5, 0.5, 64);
    CHECK(c.ratio == doctest::Approx(1.0));
  }
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Expansion e = random_expansion(2, 6, 400 + trial);
    if (e.is_constant()) continue;
    auto c = uniform_bound_check(e, 0.5, 0.5, 64);
    worst = std::max(worst, c.ratio);
  }
  CHECK(worst < 50.0);  // recorded empirical constant for this corpus
}

TEST_CASE("monotonicity and scale invariance, exact") {
  for (int trial = 0; trial < 25; ++trial) {
    Expansion e = random_expansion(2, 6, 1300 + trial);
    if (e.is_constant()) continue;
    Rational prev(-1);
    Rational r(1, 100);
    r.canonicalize();
    for (int j = 0; j < 64; ++j) {
      Rational N = freq(e, r);
      if (prev >= 0) CHECK(N >= prev);
      prev = N;
      r *= Rational(23, 20);  // log-spaced grid
    }
  }
  {
    Expansion e = random_expansion(2, 5, 77);
    Expansion scaled(2);
    for (const auto& [k, t] : e.terms()) {
      scaled.add_term(k, t.poly, t.coef * Rational(7, 3));
    }
    CHECK(freq(e, Rational(2, 3)) == freq(scaled, Rational(2, 3)));
  }
}

TEST_CASE("growth law: h(t) exp(2 int N/s ds) = h(r)") {
  // adaptive Simpson quadrature of the closed-form N as the oracle
  std::function<double(const std::function<double(double)>&, double, double)> integrate =
      [](const std::function<double(double)>& f, double a, double b) {
        std::function<double(double, double, double, double, double, int)> simp =
            [&](double lo, double hi, double flo, double fhi, double fmid,
                int depth) -> double {
          double mid = 0.5 * (lo + hi);
          double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
          double flm = f(lm), frm = f(rm);
          double whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi);
          double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
          double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
          if (depth > 24 || std::fabs(left + right - whole) < 1e-13 * std::fabs(whole)) {
            return left + right;
          }
          return simp(lo, mid, flo, fmid, flm, depth + 1) +
                 simp(mid, hi, fmid, fhi, frm, depth + 1);
        };
        double mid = 0.5 * (a + b);
        return simp(a, b, f(a), f(b), f(mid), 0);
      };
  for (int trial = 0; trial < 10; ++trial) {
    Expansion e = random_expansion(2, 5, 2100 + trial);
    if (e.is_constant()) continue;
    auto c2 = e.coeff2_all();
    auto Nd = [&](double s) {
      double num = 0, den = 0;
      for (const auto& [k, a2] : c2) {
        if (k < 1) continue;
        double w = to_double(a2) * std::pow(s, 2 * k);
        num += k * w;
        den += w;
      }
      return num / den;
    };
    double t = 0.25, r = 1.5;
    double lhs = to_double(height_centered(e, approx(t))) *
                 std::exp(2 * integrate([&](double s) { return Nd(s) / s; }, t, r));
    double rhs = to_double(height_centered(e, approx(r)));
    CHECK(std::fabs(lhs - rhs) <= 1e-8 * std::fabs(rhs));
  }
}

TEST_CASE("frequency_profile: monotone columns and pinch annotations") {
  Expansion e = two_term(2, 1, 3);
  std::vector<Rational> radii;
  for (int j = 1; j <= 16; ++j) {
    Rational r(j, 8);
    r.canonicalize();
    radii.push_back(r);
  }
  auto p = frequency_profile(e, {Rational(0), Rational(0)}, radii);
  REQUIRE(p.N.size() == radii.size());
  for (size_t i = 1; i < p.N.size(); ++i) CHECK(p.N[i] >= p.N[i - 1]);
  for (const auto& w : p.pinches) CHECK(w.delta >= 0);
  CHECK_THROWS(
      frequency_profile(e, {Rational(0), Rational(0)}, {Rational(1), Rational(1, 2)}));
}

TEST_CASE("expansion field: fast path agrees with the exact path") {
  Expansion e = random_expansion(3, 5, 4242);
  ExpansionField f(e, 2.0);
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                          rng.uniform(-0.5, 0.5)};
    std::vector<Rational> xr{approx(x[0]), approx(x[1]), approx(x[2])};
    Expansion shifted = shift_expansion(e, xr);
    auto s = f.height_coeffs(x);
    for (const auto& [k, a2] : shifted.coeff2_all()) {
      CHECK(s[k] == doctest::Approx(to_double(a2)).epsilon(1e-9));
    }
    double r = 0.37;
    CHECK(f.frequency(x, r) ==
          doctest::Approx(to_double(freq(shifted, approx(r)))).epsilon(1e-9));
    CHECK(f.value(x) == doctest::Approx(e.eval(x)).epsilon(1e-9));
  }
}
