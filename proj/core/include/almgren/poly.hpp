#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "almgren/rational.hpp"

namespace almgren {

/// Multi-index alpha of a monomial x^alpha. Length equals the ambient
/// dimension n >= 2. Ordered graded-lexicographically so that maps keyed by
/// Monomial iterate in a fixed, reproducible order.
struct Monomial {
  std::vector<uint32_t> exps;

  Monomial() = default;
  explicit Monomial(std::vector<uint32_t> e) : exps(std::move(e)) {}

  uint32_t degree() const {
    uint32_t d = 0;
    for (uint32_t e : exps) d += e;
    return d;
  }
  size_t dim() const { return exps.size(); }

  bool operator==(const Monomial& o) const { return exps == o.exps; }
  // graded lex: lower total degree first, then lexicographic on exponents
  bool operator<(const Monomial& o) const {
    uint32_t da = degree(), db = o.degree();
    if (da != db) return da < db;
    return exps < o.exps;
  }
};

/// Multivariate polynomial with exact rational coefficients. No zero
/// coefficients are stored; all monomials carry the same dimension n.
class ExactPoly {
 public:
  ExactPoly() : n_(0) {}
  explicit ExactPoly(int n) : n_(n) {}

  static ExactPoly constant(int n, const Rational& c);
  /// x_i (0-based axis).
  static ExactPoly variable(int n, int i);
  static ExactPoly monomial(int n, const Monomial& m, const Rational& c);

  int dim() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous() const;

  void add_term(const Monomial& m, const Rational& c);
  Rational coeff(const Monomial& m) const;

  ExactPoly& operator+=(const ExactPoly& o);
  ExactPoly& operator-=(const ExactPoly& o);
  ExactPoly& operator*=(const Rational& c);
  friend ExactPoly operator+(ExactPoly a, const ExactPoly& b) { return a += b; }
  friend ExactPoly operator-(ExactPoly a, const ExactPoly& b) { return a -= b; }
  friend ExactPoly operator*(ExactPoly a, const Rational& c) { return a *= c; }
  friend ExactPoly operator*(const Rational& c, ExactPoly a) { return a *= c; }
  ExactPoly operator-() const;
  friend ExactPoly operator*(const ExactPoly& a, const ExactPoly& b);
  bool operator==(const ExactPoly& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

  double eval(const std::vector<double>& x) const;
  Rational eval_exact(const std::vector<Rational>& x) const;
  std::vector<double> gradient(const std::vector<double>& x) const;

  /// Decomposition into homogeneous graded parts, indexed by degree.
  std::map<int, ExactPoly> graded_parts() const;

  /// Largest monomial in graded-lex order; zero polynomial has none.
  const Monomial* leading_monomial() const;

  /// Rescales to integer coefficients with content 1 and positive leading
  /// (graded-lex) coefficient. Returns the multiplier that was applied, so
  /// primitive = multiplier * (*this). No-op on the zero polynomial.
  Rational make_primitive();

 private:
  int n_;
  std::map<Monomial, Rational> terms_;
};

/// Sum of second partials, exact.
ExactPoly laplacian(const ExactPoly& p);

/// d/dx_i, exact.
ExactPoly partial(const ExactPoly& p, int axis);

/// Directional derivative sum_i v_i d/dx_i with exact rational direction.
ExactPoly partial(const ExactPoly& p, const std::vector<Rational>& v);

/// Average of x^alpha over the unit sphere in R^n: 0 when any exponent is
/// odd, else prod_i (alpha_i - 1)!! / prod_{j<|alpha|/2} (n + 2j).
Rational sphere_average_monomial(const Monomial& alpha, int n);

/// Average of p over the unit sphere, exact.
Rational sphere_average(const ExactPoly& p);

/// <f,g> = average of f*g over the unit sphere. Throws on dimension
/// mismatch. Exact.
Rational inner(const ExactPoly& f, const ExactPoly& g);

inline Rational norm2(const ExactPoly& f) { return inner(f, f); }

/// q(y) = p(xbar + y), exact Taylor re-expansion; degree preserved.
ExactPoly shift(const ExactPoly& p, const std::vector<Rational>& xbar);

}  // namespace almgren
