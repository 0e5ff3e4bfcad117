#include <doctest.h>

#include <cmath>

#include "almgren/hhp.hpp"
#include "builders.hpp"
#include "oracles.hpp"

using namespace almgren;
using builders::var;

TEST_CASE("dimension formula") {
  CHECK(hhp_dim(2, 5) == 2);
  CHECK(hhp_dim(3, 2) == 5);
  CHECK(hhp_dim(4, 3) == 16);  // C(6,3) - C(4,3)
  CHECK(hhp_dim(3, 0) == 1);
  CHECK(hhp_dim(3, 1) == 3);
}

TEST_CASE("basis: cardinality, harmonicity, exact orthogonality") {
  for (int n = 2; n <= 4; ++n) {
    for (int d = 0; d <= 4; ++d) {
      const HhpBasis& b = basis_cached(n, d);
      CHECK(static_cast<long>(b.size()) == hhp_dim(n, d));
      for (size_t i = 0; i < b.size(); ++i) {
        CHECK(laplacian(b.elements[i]).is_zero());
        CHECK(b.elements[i].is_homogeneous());
        CHECK(b.elements[i].degree() == d);
        CHECK(inner(b.elements[i], b.elements[i]) == b.norm2[i]);
        for (size_t j = i + 1; j < b.size(); ++j) {
          CHECK(inner(b.elements[i], b.elements[j]) == 0);
        }
      }
    }
  }
  // determinism across construction calls
  HhpBasis b1 = basis(3, 3), b2 = basis(3, 3);
  for (size_t i = 0; i < b1.size(); ++i) CHECK(b1.elements[i] == b2.elements[i]);
}

TEST_CASE("basis_2d: paper pair, exact norms, trig expansion") {
  HhpBasis b1 = basis_2d(1);
  CHECK(b1.elements[0] == var(2, 1) * Rational(2));  // 2y
  CHECK(b1.elements[1] == var(2, 0) * Rational(2));  // 2x
  CHECK(b1.norm2[0] == 2);
  CHECK(b1.norm2[1] == 2);
  // d=2 sine part expands to 4xy
  CHECK(basis_2d(2).elements[0] == var(2, 0) * var(2, 1) * Rational(4));
  for (int d = 1; d <= 10; ++d) {
    HhpBasis b = basis_2d(d);
    CHECK(inner(b.elements[0], b.elements[1]) == 0);
    CHECK(b.norm2[0] == 2);
    CHECK(b.norm2[1] == 2);
  }
}

TEST_CASE("gradient norm identity (all ordered pairs, small range)") {
  // sum_i ||d_i P||^2 = d(2d+n-2) ||P||^2, checked inside the call
  for (int n = 2; n <= 4; ++n) {
    for (int d = 1; d <= 4; ++d) {
      const HhpBasis& b = basis_cached(n, d);
      for (size_t i = 0; i < b.size(); ++i) {
        Rational g = gradient_norm_sq(b.elements[i]);
        CHECK(g == Rational(d) * Rational(2 * d + n - 2) * b.norm2[i]);
      }
    }
  }
  // normalized examples: n=3 d=1 gives 3, n=2 d=3 gives 18
  ExactPoly x1 = var(3, 0);
  CHECK(gradient_norm_sq(x1) / norm2(x1) == Rational(3));
  ExactPoly p23 = builders::re_zd(3);
  CHECK(gradient_norm_sq(p23) / norm2(p23) == Rational(18));
  // basis(4,4) elements give exactly 4 * 10 = 40
  const HhpBasis& b44 = basis_cached(4, 4);
  CHECK(gradient_norm_sq(b44.elements[0]) / b44.norm2[0] == Rational(40));
  CHECK_THROWS(gradient_norm_sq(var(2, 0) * var(2, 0)));  // not harmonic
}

TEST_CASE("sup norm bound: measured <= sqrt(dim), sharp cases") {
  // linear 2x in n=2: sup = 2, bound = sqrt(2) ||2x|| = 2
  {
    auto c = sup_norm_bound_check(var(2, 0) * Rational(2));
    CHECK(c.bound == doctest::Approx(std::sqrt(2.0)));
    CHECK(c.measured_sup <= c.bound * (1 + 1e-9));
    CHECK(c.measured_sup == doctest::Approx(c.bound).epsilon(1e-4));
  }
  // zonal harmonic n=3 d=2 attains the bound sqrt(5)
  {
    ExactPoly zonal = var(3, 2) * var(3, 2) * Rational(3);
    zonal -= var(3, 0) * var(3, 0) + var(3, 1) * var(3, 1) + var(3, 2) * var(3, 2);
    auto c = sup_norm_bound_check(zonal);
    CHECK(c.bound == doctest::Approx(std::sqrt(5.0)));
    CHECK(c.measured_sup <= c.bound * (1 + 1e-9));
    CHECK(c.measured_sup >= 0.99 * c.bound);
  }
  // generic elements stay below the bound
  const HhpBasis& b = basis_cached(3, 4);
  for (size_t i = 0; i < b.size(); ++i) {
    auto c = sup_norm_bound_check(b.elements[i], 4000);
    CHECK(c.measured_sup <= c.bound * (1 + 1e-9));
  }
}

TEST_CASE("kelvin: degree raise, harmonicity, orthogonality, norm drop") {
  // constant -> x1 (d=1, n=3)
  CHECK(kelvin(ExactPoly::constant(3, Rational(1))) == var(3, 0));
  // x2 -> x1 x2
  CHECK(kelvin(var(3, 1)) == var(3, 0) * var(3, 1));
  // p = x1 (d=2, n=3): K = x1^2 - |x|^2/3, harmonic and orthogonal to the
  // x1-invariant degree-2 space
  {
    ExactPoly K = kelvin(var(3, 0));
    ExactPoly want = var(3, 0) * var(3, 0);
    want -= (var(3, 0) * var(3, 0) + var(3, 1) * var(3, 1) + var(3, 2) * var(3, 2)) *
            Rational(1, 3);
    CHECK(K == want);
    CHECK(laplacian(K).is_zero());
    InvariantSplit s = invariant_decompose(K, {0});
    CHECK(s.Q.is_zero());
  }
  // d=1, n=2 edge: 2d+n-4 = 0 and the correction term vanishes
  CHECK(kelvin(ExactPoly::constant(2, Rational(1))) == var(2, 0));

  // K is injective and dim P_d = dim P_d(inv) + dim P_{d-1}: every K image
  // is nonzero, orthogonal to the invariant space, and images of the basis
  // are linearly independent (exact Gram determinant nonzero)
  for (int n = 3; n <= 4; ++n) {
    for (int d = 2; d <= 3; ++d) {
      const HhpBasis& lower = basis_cached(n, d - 1);
      std::vector<ExactPoly> images;
      for (const auto& p : lower.elements) {
        ExactPoly K = kelvin(p);
        CHECK(!K.is_zero());
        CHECK(laplacian(K).is_zero());
        InvariantSplit s = invariant_decompose(K, {0});
        CHECK(s.Q.is_zero());
        images.push_back(K);
      }
      CHECK(static_cast<long>(images.size()) + hhp_dim(n - 1, d) == hhp_dim(n, d));
      // pairwise-independent via Gram-Schmidt survival
      std::vector<ExactPoly> gs;
      for (ExactPoly p : images) {
        for (const auto& q : gs) {
          Rational c = inner(p, q) / inner(q, q);
          if (c != 0) p -= q * c;
        }
        CHECK(!p.is_zero());
        gs.push_back(p);
      }
      // norm estimate ||K[p]|| <= ||p||
      for (size_t i = 0; i < lower.size(); ++i) {
        CHECK(norm2(images[i]) <= lower.norm2[i]);
      }
    }
  }
}

TEST_CASE("invariant_decompose: exact split and recomposition") {
  // already invariant -> delta = 0
  {
    ExactPoly p = builders::embed_2d(builders::re_zd(2), 3);  // x2^2 - x3^2 pattern on axes 1,2
    // re_zd(2) depends on axes (0,1); embed on (0,1) then test invariance in axis 2
    InvariantSplit s = invariant_decompose(p, {2});
    CHECK(s.delta2 == 0);
    CHECK(s.R.is_zero());
    CHECK(s.Q == p);
  }
  // x1 x2 against axis 0 is fully non-invariant
  {
    InvariantSplit s = invariant_decompose(var(3, 0) * var(3, 1), {0});
    CHECK(s.delta2 == 1);
    CHECK(s.Q.is_zero());
  }
  // recomposition P = Q + R exactly, random basis combinations
  {
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
      const HhpBasis& b = basis_cached(4, 3);
      ExactPoly p(4);
      for (size_t j = 0; j < b.size(); ++j) {
        p += b.elements[j] * Rational(rng.uniform_int(-3, 3));
      }
      if (p.is_zero()) continue;
      InvariantSplit s = invariant_decompose(p, {0, 1});
      CHECK(s.Q + s.R == p);
      CHECK(inner(s.Q, s.R) == 0);
    }
  }
  // constructed delta = 3/5 in n=3 (Pythagorean norms)
  {
    ExactPoly Q = builders::sq_diff(3, 1, 2) * Rational(2);  // 2(x2^2 - x3^2)
    ExactPoly R = var(3, 0) * var(3, 1) * Rational(3);       // 3 x1 x2
    InvariantSplit s = invariant_decompose(Q + R, {0});
    CHECK(s.delta2 == Rational(9, 25));
    CHECK(s.delta == doctest::Approx(0.6));
  }
  // constructed delta = 1/10 exactly, n = 4: ||Q||^2 = 99 ||R||^2
  {
    ExactPoly Q = builders::sq_diff(4, 1, 2) * Rational(2);
    Q += var(4, 1) * var(4, 2) * Rational(17);
    Q += var(4, 1) * var(4, 3) * Rational(17);
    ExactPoly R = kelvin(var(4, 0)) * Rational(2);
    CHECK(norm2(Q) == Rational(99) * norm2(R));
    InvariantSplit s = invariant_decompose(Q + R, {0});
    CHECK(s.delta2 == Rational(1, 100));
    CHECK(s.Q == Q);
    CHECK(s.R == R);
  }
  // prop_poly2 bound: small partials force small delta
  {
    const HhpBasis& b = basis_cached(3, 3);
    for (size_t i = 0; i < b.size(); ++i) {
      const ExactPoly& P = b.elements[i];
      InvariantSplit s = invariant_decompose(P, {0});
      Rational dP = inner(partial(P, 0), partial(P, 0));
      Rational grad = gradient_norm_sq(P);
      // if ||d_1 P||^2 <= eps ||grad P||^2 then delta^2 <= n * eps * d^2
      Rational eps = dP / grad;
      CHECK(s.delta2 <= Rational(3) * eps * Rational(9) + Rational(1, 1000000));
    }
  }
}

TEST_CASE("perp_derivative_bound_check: exact inequality and inner identity") {
  // h = x1 (d=1): every degree-1 invariant-complement element
  {
    auto c = perp_derivative_bound_check(var(3, 0));
    CHECK(c.h_norm2 <= c.dh_norm2);  // 1/3 <= 1
    CHECK(c.h_norm2 == Rational(1, 3));
    CHECK(c.dh_norm2 == 1);
  }
  // h = K[x2] = x1 x2 in n=3
  {
    auto c = perp_derivative_bound_check(var(3, 0) * var(3, 1));
    CHECK(c.h_norm2 <= c.dh_norm2);
  }
  // rejects inputs with an invariant component
  CHECK_THROWS(perp_derivative_bound_check(builders::sq_diff(3, 1, 2)));

  // the K-image of every basis element satisfies ||h|| <= ||d_1 h|| exactly
  for (int n = 3; n <= 4; ++n) {
    for (int d = 2; d <= 4; ++d) {
      const HhpBasis& lower = basis_cached(n, d - 1);
      for (const auto& p : lower.elements) {
        auto c = perp_derivative_bound_check(kelvin(p));
        CHECK(c.h_norm2 <= c.dh_norm2);
      }
    }
  }

  // lemma identity <p, x1 d1 p> = ||d1 p||^2 / (2d + n - 2), exact
  {
    ExactPoly p = kelvin(var(3, 0));  // x1^2 - |x|^2/3, d = 2, n = 3
    Rational lhs = inner(p, ExactPoly::variable(3, 0) * partial(p, 0));
    Rational dp = inner(partial(p, 0), partial(p, 0));
    CHECK(lhs * Rational(2 * 2 + 3 - 2) == dp);
  }
  for (int n = 2; n <= 4; ++n) {
    for (int d = 1; d <= 4; ++d) {
      const HhpBasis& b = basis_cached(n, d);
      for (const auto& p : b.elements) {
        Rational lhs = inner(p, ExactPoly::variable(n, 0) * partial(p, 0));
        Rational dp = inner(partial(p, 0), partial(p, 0));
        CHECK(lhs * Rational(2 * d + n - 2) == dp);
      }
    }
  }
}

TEST_CASE("restriction_norm_ratio: products and cross-checks") {
  CHECK(restriction_norm_ratio(3, 1) == Rational(3, 2));
  CHECK(restriction_norm_ratio(3, 2) == Rational(15, 8));
  // ||x2||^2 on the circle over ||x2||^2 on S^2: (1/2)/(1/3) = 3/2
  Rational r2 = inner(var(2, 1), var(2, 1));
  Rational r3 = inner(var(3, 1), var(3, 1));
  CHECK(r2 / r3 == restriction_norm_ratio(3, 1));
  // invariant P: ratio relates the two norms exactly
  for (int d = 1; d <= 4; ++d) {
    ExactPoly p2 = builders::re_zd(d);  // polynomial in (x, y)
    ExactPoly p3 = builders::embed_2d(p2, 3);
    CHECK(norm2(p2) == restriction_norm_ratio(3, d) * norm2(p3));
  }
  // growth bound ratio <= e^2 sqrt(1 + (2d-2)/(n-1))
  for (int n = 3; n <= 5; ++n) {
    for (int d = 1; d <= 8; ++d) {
      double ratio = to_double(restriction_norm_ratio(n, d));
      double bound = std::exp(2.0) * std::sqrt(1.0 + (2.0 * d - 2) / (n - 1));
      CHECK(ratio <= bound);
    }
  }
}

TEST_CASE("almost_invariant_subspace: invariant directions land in V") {
  // P = 4xy extended x3-invariantly to n=3: V = span(e3). The containment
  // radius tau forces eps <= tau^2/2 (the Gram quadratic form caps the
  // drift of an almost-invariant direction at sqrt(2 eps)).
  {
    ExactPoly P = builders::embed_2d(basis_2d(2).elements[0], 3);
    auto rep = almost_invariant_subspace(P, P, 2e-5, 1e-2, 6000);
    REQUIRE(rep.V.size() == 1);
    CHECK(std::fabs(std::fabs(rep.V[0][2]) - 1.0) < 1e-9);
    CHECK(rep.max_dist <= rep.tau);
    CHECK(!rep.directions.empty());
  }
  // 2-variable P in n=4: dim V = 2
  {
    ExactPoly P = builders::embed_2d(basis_2d(3).elements[1], 4);
    auto rep = almost_invariant_subspace(P, P, 2e-5, 1e-2, 6000);
    CHECK(rep.V.size() == 2);
    CHECK(rep.max_dist <= rep.tau);
    CHECK(!rep.directions.empty());
  }
  // linear input rejected
  CHECK_THROWS(almost_invariant_subspace(var(3, 0), var(3, 0), 1e-4, 1e-2, 100));
  // far-apart polynomials rejected
  {
    const HhpBasis& b = basis_cached(3, 2);
    CHECK_THROWS(almost_invariant_subspace(b.elements[0], b.elements[1], 1e-4, 1e-2, 100));
  }
}

TEST_CASE("cone splitting, Euler form: bi-homogeneous implies invariant") {
  // P two-variable extended invariantly along e3: homogeneous wrt 0 and
  // wrt t e3, so the derivative along e3 vanishes identically
  ExactPoly P = builders::embed_2d(builders::re_zd(3), 3);
  CHECK(partial(P, {Rational(0), Rational(0), Rational(5)}).is_zero());
  ExactPoly Q = builders::embed_2d(builders::im_zd(4), 4);
  CHECK(partial(Q, {Rational(0), Rational(0), Rational(1), Rational(2)}).is_zero());
}

TEST_CASE("exact invariant subspace dimension: n-1 iff linear") {
  for (int n = 2; n <= 4; ++n) {
    for (int d = 1; d <= (n == 4 ? 4 : 5); ++d) {
      const HhpBasis& b = basis_cached(n, d);
      for (const auto& p : b.elements) {
        int dim = invariant_subspace_dim_exact(p);
        if (d == 1) {
          CHECK(dim == n - 1);
        } else {
          CHECK(dim <= n - 2);
        }
      }
    }
  }
}
