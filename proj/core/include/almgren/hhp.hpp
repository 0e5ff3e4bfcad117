#pragma once

#include <vector>

#include "almgren/poly.hpp"

namespace almgren {

/// dim P_d on R^n: 1 for d=0, n for d=1, else
/// C(n+d-1, n-1) - C(n+d-3, n-1).
long hhp_dim(int n, int d);

/// Orthogonal basis of the homogeneous harmonic polynomials of degree d.
/// Elements are stored with primitive integer coefficients together with
/// their exact squared norms; the normalized element is
/// elements[i] / sqrt(norm2[i]). Orthogonality <e_i,e_j> = 0 is exact.
struct HhpBasis {
  int n = 0;
  int d = 0;
  std::vector<ExactPoly> elements;
  std::vector<Rational> norm2;

  size_t size() const { return elements.size(); }
  /// Value of the normalized element at a point.
  double unit_eval(size_t i, const std::vector<double>& x) const;
};

/// Kernel of the Laplacian on homogeneous degree-d polynomials,
/// Gram-Schmidt orthogonalized in graded-lex order. Deterministic.
HhpBasis basis(int n, int d);

/// Memoized basis, safe for concurrent callers.
const HhpBasis& basis_cached(int n, int d);

/// The pair {2 r^d sin(d theta), 2 r^d cos(d theta)} expanded into
/// monomials (sin part first). Stored norm2 is exactly 2 for each.
HhpBasis basis_2d(int d);

/// Returns sum_i <d_i P, d_i P> for a homogeneous harmonic P of degree d,
/// after asserting the exact identity sum = d(2d+n-2) <P,P>.
/// Throws std::invalid_argument on non-harmonic or non-homogeneous input.
Rational gradient_norm_sq(const ExactPoly& P);

struct SupNormCheck {
  double measured_sup;  // max |P| over the sample, normalized by ||P||
  double bound;         // sqrt(dim P_d)
};

/// Dense-sample check of the sharp sup bound |P| <= sqrt(dim) ||P||.
SupNormCheck sup_norm_bound_check(const ExactPoly& P, int samples = 0);

/// K[p] = x_a p - |x|^2 d_a p / (2d + n - 4) for p homogeneous harmonic of
/// degree d-1. When 2d+n-4 = 0 (d=1, n=2) the correction term vanishes
/// along with d_a p and is treated as 0.
ExactPoly kelvin(const ExactPoly& p, int axis = 0);

/// Orthogonal split P = Q + R with Q the projection onto the
/// axes-invariant subspace of P_d. delta2 = ||R||^2 / ||P||^2 exactly; in
/// the paper's normalized form P = sqrt(1-delta^2) Q^ + delta R^ with
/// Q^, R^ the unit multiples of Q, R.
struct InvariantSplit {
  ExactPoly Q;
  ExactPoly R;
  Rational delta2;
  double delta = 0.0;
};

InvariantSplit invariant_decompose(const ExactPoly& P, const std::vector<int>& axes);

struct PerpDerivativeCheck {
  Rational h_norm2;
  Rational dh_norm2;
};

/// For h in the orthogonal complement of the x_axis-invariant subspace:
/// verifies membership by projection, then returns ||h||^2 and
/// ||d_axis h||^2 (the inequality ||h|| <= ||d_axis h|| is checked
/// exactly). Throws if h is not in the complement.
PerpDerivativeCheck perp_derivative_bound_check(const ExactPoly& h, int axis = 0);

/// prod_{k=1}^{d} (n + 2k - 2) / (n + 2k - 3), the exact ratio
/// ||P||^2_{n-1} / ||P||^2_n for x_1-invariant P of degree d.
Rational restriction_norm_ratio(int n, int d);

struct AlmostInvariantReport {
  // sampled unit vectors v with ||d_v P||^2 <= eps ||grad P||^2, for P and P'
  std::vector<std::vector<double>> directions;
  // orthonormal spanning set of the almost invariant subspace, dim <= n-2
  std::vector<std::vector<double>> V;
  double tau = 0.0;
  // max distance of a reported direction from V (containment radius check)
  double max_dist = 0.0;
  std::vector<double> gram_eigenvalues;
};

/// Gram-matrix eigenstructure version of almost cone splitting: V is the
/// span of eigenvectors of M_ij = <d_iP, d_jP>/<P,P> with eigenvalue below
/// eps * d(2d+n-2). Requires deg >= 2 and ||P/||P|| - P'/||P'|| || <= sqrt(eps);
/// asserts dim V <= n-2 and that all sampled almost-invariant directions of
/// P and P' lie within tau of V.
AlmostInvariantReport almost_invariant_subspace(const ExactPoly& P,
                                                const ExactPoly& Pprime,
                                                double eps, double tau,
                                                int sphere_samples = 0);

/// Exact dimension of {v : d_v P = 0} (the invariant subspace of P).
int invariant_subspace_dim_exact(const ExactPoly& P);

}  // namespace almgren
