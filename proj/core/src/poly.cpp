#include "almgren/poly.hpp"

#include <stdexcept>

namespace almgren {

ExactPoly ExactPoly::constant(int n, const Rational& c) {
  ExactPoly p(n);
  p.add_term(Monomial(std::vector<uint32_t>(n, 0)), c);
  return p;
}

ExactPoly ExactPoly::variable(int n, int i) {
  ExactPoly p(n);
  std::vector<uint32_t> e(n, 0);
  e[i] = 1;
  p.add_term(Monomial(std::move(e)), Rational(1));
  return p;
}

ExactPoly ExactPoly::monomial(int n, const Monomial& m, const Rational& c) {
  ExactPoly p(n);
  p.add_term(m, c);
  return p;
}

int ExactPoly::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.rbegin()->first.degree());
}

bool ExactPoly::is_homogeneous() const {
  if (terms_.empty()) return true;
  uint32_t d = terms_.begin()->first.degree();
  for (const auto& [m, c] : terms_) {
    if (m.degree() != d) return false;
  }
  return true;
}

void ExactPoly::add_term(const Monomial& m, const Rational& c_in) {
  // mpq comparisons require canonical form; callers may hand us raw pairs
  Rational c = c_in;
  c.canonicalize();
  if (c == 0) return;
  if (static_cast<int>(m.dim()) != n_) {
    throw std::invalid_argument("monomial dimension mismatch");
  }
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational ExactPoly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

ExactPoly& ExactPoly::operator+=(const ExactPoly& o) {
  if (n_ == 0) n_ = o.n_;
  if (o.n_ != 0 && o.n_ != n_) throw std::invalid_argument("dimension mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

ExactPoly& ExactPoly::operator-=(const ExactPoly& o) {
  if (n_ == 0) n_ = o.n_;
  if (o.n_ != 0 && o.n_ != n_) throw std::invalid_argument("dimension mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

ExactPoly& ExactPoly::operator*=(const Rational& c_in) {
  Rational c = c_in;
  c.canonicalize();
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

ExactPoly ExactPoly::operator-() const {
  ExactPoly r(*this);
  for (auto& [m, v] : r.terms_) v = -v;
  return r;
}

ExactPoly operator*(const ExactPoly& a, const ExactPoly& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("dimension mismatch");
  ExactPoly r(a.n_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m(ma);
      for (size_t i = 0; i < m.exps.size(); ++i) m.exps[i] += mb.exps[i];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

double ExactPoly::eval(const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = to_double(c);
    for (size_t i = 0; i < m.exps.size(); ++i) {
      for (uint32_t k = 0; k < m.exps[i]; ++k) t *= x[i];
    }
    s += t;
  }
  return s;
}

Rational ExactPoly::eval_exact(const std::vector<Rational>& x) const {
  Rational s(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (size_t i = 0; i < m.exps.size(); ++i) {
      for (uint32_t k = 0; k < m.exps[i]; ++k) t *= x[i];
    }
    s += t;
  }
  return s;
}

std::vector<double> ExactPoly::gradient(const std::vector<double>& x) const {
  std::vector<double> g(n_, 0.0);
  for (const auto& [m, c] : terms_) {
    double base = to_double(c);
    // powers computed per axis; cheap at the monomial counts we deal with
    for (int i = 0; i < n_; ++i) {
      if (m.exps[i] == 0) continue;
      double t = base * m.exps[i];
      for (int j = 0; j < n_; ++j) {
        uint32_t e = m.exps[j] - (j == i ? 1 : 0);
        for (uint32_t k = 0; k < e; ++k) t *= x[j];
      }
      g[i] += t;
    }
  }
  return g;
}

std::map<int, ExactPoly> ExactPoly::graded_parts() const {
  std::map<int, ExactPoly> parts;
  for (const auto& [m, c] : terms_) {
    int d = static_cast<int>(m.degree());
    auto it = parts.find(d);
    if (it == parts.end()) {
      it = parts.emplace(d, ExactPoly(n_)).first;
    }
    it->second.add_term(m, c);
  }
  return parts;
}

const Monomial* ExactPoly::leading_monomial() const {
  if (terms_.empty()) return nullptr;
  return &terms_.rbegin()->first;
}

Rational ExactPoly::make_primitive() {
  if (terms_.empty()) return Rational(1);
  Integer den_lcm(1), num_gcd(0);
  for (const auto& [m, c] : terms_) {
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
  }
  for (const auto& [m, c] : terms_) {
    Integer num = c.get_num() * (den_lcm / c.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), num.get_mpz_t());
  }
  Rational mult(den_lcm, num_gcd);
  mult.canonicalize();
  if (terms_.rbegin()->second < 0) mult = -mult;
  *this *= mult;
  return mult;
}

ExactPoly partial(const ExactPoly& p, int axis) {
  if (axis < 0 || axis >= p.dim()) throw std::invalid_argument("axis out of range");
  ExactPoly r(p.dim());
  for (const auto& [m, c] : p.terms()) {
    if (m.exps[axis] == 0) continue;
    Monomial d(m);
    d.exps[axis] -= 1;
    r.add_term(d, c * Rational(m.exps[axis]));
  }
  return r;
}

ExactPoly partial(const ExactPoly& p, const std::vector<Rational>& v) {
  if (static_cast<int>(v.size()) != p.dim()) {
    throw std::invalid_argument("direction dimension mismatch");
  }
  ExactPoly r(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    if (v[i] == 0) continue;
    r += partial(p, i) * v[i];
  }
  return r;
}

ExactPoly laplacian(const ExactPoly& p) {
  ExactPoly r(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    for (const auto& [m, c] : p.terms()) {
      if (m.exps[i] < 2) continue;
      Monomial d(m);
      d.exps[i] -= 2;
      r.add_term(d, c * Rational(m.exps[i]) * Rational(m.exps[i] - 1));
    }
  }
  return r;
}

Rational sphere_average_monomial(const Monomial& alpha, int n) {
  uint32_t total = 0;
  for (uint32_t e : alpha.exps) {
    if (e % 2 == 1) return Rational(0);
    total += e;
  }
  // prod_i (alpha_i - 1)!!  over  prod_{j=0}^{total/2 - 1} (n + 2j)
  Integer num(1);
  for (uint32_t e : alpha.exps) {
    for (uint32_t k = e; k > 1; k -= 2) num *= Integer(k - 1);
  }
  Integer den(1);
  for (uint32_t j = 0; j < total / 2; ++j) den *= Integer(n + 2 * j);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational sphere_average(const ExactPoly& p) {
  Rational s(0);
  for (const auto& [m, c] : p.terms()) {
    s += c * sphere_average_monomial(m, p.dim());
  }
  return s;
}

Rational inner(const ExactPoly& f, const ExactPoly& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("dimension mismatch");
  return sphere_average(f * g);
}

ExactPoly shift(const ExactPoly& p, const std::vector<Rational>& xbar) {
  if (static_cast<int>(xbar.size()) != p.dim()) {
    throw std::invalid_argument("shift point dimension mismatch");
  }
  // substitute x_i -> xbar_i + y_i using cached per-axis binomial expansions
  ExactPoly r(p.dim());
  for (const auto& [m, c] : p.terms()) {
    // expand prod_i (xbar_i + y_i)^{e_i}
    std::vector<std::pair<Monomial, Rational>> acc;
    acc.emplace_back(Monomial(std::vector<uint32_t>(p.dim(), 0)), c);
    for (int i = 0; i < p.dim(); ++i) {
      uint32_t e = m.exps[i];
      if (e == 0) continue;
      std::vector<std::pair<Monomial, Rational>> next;
      for (uint32_t k = 0; k <= e; ++k) {
        // choose k powers of y_i, e-k powers of xbar_i
        if (xbar[i] == 0 && k != e) continue;
        Rational w = binomial(e, k) * pow_rational(xbar[i], e - k);
        if (w == 0) continue;
        for (const auto& [mm, cc] : acc) {
          Monomial m2(mm);
          m2.exps[i] += k;
          next.emplace_back(std::move(m2), cc * w);
        }
      }
      acc.swap(next);
    }
    for (auto& [mm, cc] : acc) r.add_term(mm, cc);
  }
  return r;
}

}  // namespace almgren
