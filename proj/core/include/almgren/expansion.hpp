#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "almgren/poly.hpp"

namespace almgren {

struct UndefinedFrequency : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One spherical-harmonic component: the degree-k part of the function is
/// coef * poly. The normalized view is a_k = coef * ||poly|| (sign of coef)
/// against the unit polynomial poly/||poly||; a_k^2 stays exact rational.
struct ExpansionTerm {
  int k = 0;
  ExactPoly poly;
  Rational coef;
};

/// Finite spherical-harmonic expansion
///   u(x0 + z) = (1/sqrt(scale2)) * sum_k coef_k * poly_k(z),
/// at most one term per degree, each poly homogeneous harmonic of its
/// degree. scale2 carries boundary normalizations (tangent maps) so the
/// stored data stays rational.
class Expansion {
 public:
  Expansion() = default;
  Expansion(int n, std::vector<Rational> x0) : n_(n), x0_(std::move(x0)) {}
  explicit Expansion(int n) : n_(n), x0_(n, Rational(0)) {}

  int dim() const { return n_; }
  const std::vector<Rational>& base_point() const { return x0_; }
  const std::map<int, ExpansionTerm>& terms() const { return terms_; }
  const Rational& scale2() const { return scale2_; }
  void set_scale2(Rational s) { scale2_ = std::move(s); }

  /// Adds coef * poly to the degree-k component (poly must be homogeneous
  /// harmonic of degree k).
  void add_term(int k, ExactPoly poly, Rational coef);

  bool empty() const { return terms_.empty(); }
  int max_degree() const;
  /// Smallest degree >= 1 with a nonzero term; -1 if none.
  int min_positive_degree() const;
  bool is_constant() const { return min_positive_degree() < 0; }

  /// a_k^2, exact. Zero for missing degrees.
  Rational coeff2(int k) const;
  /// (degree, a_k^2) pairs, ascending degree (includes k=0 if present).
  std::vector<std::pair<int, Rational>> coeff2_all() const;

  /// Value at base-point-local coordinates z.
  double eval_local(const std::vector<double>& z) const;
  /// Value / gradient at a global point x (z = x - x0).
  double eval(const std::vector<double>& x) const;
  std::vector<double> gradient(const std::vector<double>& x) const;

  /// Degree-k term as (primitive polynomial, sign): the paper's unit P_k
  /// with a positive leading graded-lex coefficient, exact.
  std::optional<std::pair<ExactPoly, int>> unit_term(int k) const;

 private:
  int n_ = 0;
  std::vector<Rational> x0_;
  std::map<int, ExpansionTerm> terms_;
  Rational scale2_ = Rational(1);
};

/// h(r) = sum_k a_k^2 r^{2k} over the stored terms (the exact mean of u^2
/// over the sphere of radius r around the base point).
Rational height(const Expansion& e, const Rational& r);

/// Same with the degree-0 term removed: mean of (u - u(x0))^2.
Rational height_centered(const Expansion& e, const Rational& r);

/// Normalized Almgren frequency at the base point:
/// N(r) = sum_{k>=1} k a_k^2 r^{2k} / sum_{k>=1} a_k^2 r^{2k}. Exact.
/// Throws UndefinedFrequency for constant expansions.
Rational freq(const Expansion& e, const Rational& r);

/// Expansion of the same function about global point x: exact Taylor
/// re-expansion of every term, regrouped into graded parts.
Expansion shift_expansion(const Expansion& e, const std::vector<Rational>& x);

/// N_u(x, r) by recentering: shift, drop the constant, evaluate freq.
Rational freq_at(const Expansion& e, const std::vector<Rational>& x, const Rational& r);

/// Tangent map T_{x,r}: recentered, blown up by r, boundary-normalized so
/// that the centered height at radius 1 is exactly 1.
Expansion tangent_map(const Expansion& e, const std::vector<Rational>& x, const Rational& r);

/// N(x, r1) - N(x, r2); nonnegative for harmonic expansions.
Rational pinch(const Expansion& e, const std::vector<Rational>& x, const Rational& r2,
               const Rational& r1);

struct PinchOdeCheck {
  Rational lhs;        // r N'(r), exact
  Rational rhs;        // 2 eps (1 - eps) with eps = dist(N(r), Z), exact
  Rational eps;
  Rational freq_value;
  double drop_over_e;  // N(r) - N(r/e), double (the corollary form)
};

/// Exact differentiation of the rational function N at radius r, plus the
/// corollary drop N(r) - N(r/e).
PinchOdeCheck pinch_ode_check(const Expansion& e, const Rational& r);

struct DominantDegreeOutcome {
  bool dominant = false;       // a_d^2 r^{2d} >= (1-6 eps) h(r) for some d
  int degree = -1;             // witnessing d when dominant
  Rational dominant_ratio;     // max_d a_d^2 r^{2d} / h(r), exact
  bool frequency_drop = false; // N(r) - N(r/e) >= eps
  double drop = 0.0;
};

/// Either-or of the pinching dichotomy; asserts at least one branch holds.
DominantDegreeOutcome dominant_degree(const Expansion& e, const Rational& r, double eps);

struct TangentUniquenessReport {
  int d = -1;
  ExactPoly P_d;            // primitive unit representative, positive leading coef
  int sign = 1;
  double max_freq_dev = 0;  // sup |N(t) - d| over (r2, r1)
  double min_mass_ratio = 1;  // inf a_d^2 t^{2d} / h(t) over (e r2, r1/e)
  double max_l2_dist = 0;     // sup of the sphere L2 distance^2 |T - P_d|^2
  double max_grad_dist = 0;   // sup of the ball W12 distance^2
  bool freq_dev_ok = false;   // <= 3 eps
  bool mass_ok = false;       // >= 1 - 6 eps
  bool l2_ok = false;         // <= 7 eps
  bool grad_ok = false;       // <= 7 d eps
  bool unique = false;        // same P_d extracted across the window
};

/// Effective tangent-map uniqueness: checks items (i)-(iv) with the 3/6/7
/// constants over the stated windows. Preconditions: pinch <= eps <= eps0
/// and r2 <= r1/e^3.
TangentUniquenessReport tangent_uniqueness_check(const Expansion& e, const Rational& r2,
                                                 const Rational& r1, double eps,
                                                 double eps0 = 1e-3);

struct UniformBoundCheck {
  double max_inner_freq = 0;  // max over sampled |x| <= r of N(x, k(1-r))
  double base_freq = 0;       // N(0, 1)
  double ratio = 0;
};

/// Empirical version of the uniform frequency control: samples the ball
/// |x| <= r and reports max N(x, k(1-r)) against N(0,1).
UniformBoundCheck uniform_bound_check(const Expansion& e, double r, double k,
                                      int samples = 256);

struct FrequencyProfile {
  std::vector<double> center;
  std::vector<double> radii;
  std::vector<double> N;
  std::vector<double> h;
  struct PinchWindow {
    double r2, r1, delta;
  };
  std::vector<PinchWindow> pinches;
};

/// Samples (r, N, h) on the given schedule; pinch annotations for each
/// consecutive pair. Radii must be increasing.
FrequencyProfile frequency_profile(const Expansion& e, const std::vector<Rational>& x,
                                   const std::vector<Rational>& radii);

}  // namespace almgren
