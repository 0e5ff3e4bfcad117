#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace almgren {

/// Exact rational scalar. Always in lowest terms with positive denominator
/// (GMP keeps mpq_class canonical through arithmetic).
using Rational = mpq_class;
using Integer = mpz_class;

inline double to_double(const Rational& q) { return q.get_d(); }

/// Parses "p/q" or "p"; throws on malformed input or zero denominator.
inline Rational rational_from_string(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
  q.canonicalize();
  if (q.get_den() == 0) {
    throw std::invalid_argument("zero denominator: " + s);
  }
  return q;
}

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) { return Rational(x); }

inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

inline Integer floor_int(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

/// Nearest integer with exact half-integers tied toward the lower integer.
inline Integer nearest_int_tie_low(const Rational& q) {
  Integer f = floor_int(q);
  Rational frac = q - Rational(f);
  return (frac > Rational(1, 2)) ? Integer(f + 1) : f;
}

/// dist(q, Z) as an exact rational.
inline Rational dist_to_integers(const Rational& q) {
  Integer f = floor_int(q);
  Rational lo = q - Rational(f);
  Rational hi = Rational(f + 1) - q;
  return lo <= hi ? lo : hi;
}

inline Rational pow_rational(const Rational& q, unsigned e) {
  Rational r(1);
  Rational b = q;
  unsigned k = e;
  while (k) {
    if (k & 1u) r *= b;
    b *= b;
    k >>= 1u;
  }
  return r;
}

inline Rational binomial(unsigned n, unsigned k) {
  if (k > n) return Rational(0);
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Rational(r);
}

}  // namespace almgren
