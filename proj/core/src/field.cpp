#include "almgren/field.hpp"

#include <cmath>

namespace almgren {

std::vector<double> FieldEvaluator::hessian(const std::vector<double>& x) const {
  int n = dim();
  const double h = 1e-5;
  std::vector<double> H(n * n, 0.0);
  for (int j = 0; j < n; ++j) {
    std::vector<double> xp(x), xm(x);
    xp[j] += h;
    xm[j] -= h;
    auto gp = gradient(xp);
    auto gm = gradient(xm);
    for (int i = 0; i < n; ++i) H[i * n + j] = (gp[i] - gm[i]) / (2 * h);
  }
  return H;
}

namespace {

// flat monomial representation for fast double evaluation
struct FlatPoly {
  // exps packed per term: n entries each
  std::vector<uint32_t> exps;
  std::vector<double> coefs;
  int n = 0;

  void from_exact(const ExactPoly& p, double scale) {
    n = p.dim();
    for (const auto& [m, c] : p.terms()) {
      for (int i = 0; i < n; ++i) exps.push_back(m.exps[i]);
      coefs.push_back(to_double(c) * scale);
    }
  }

  // powers: row-major [axis][exponent] table
  double eval(const std::vector<double>& powers, int max_e) const {
    double s = 0.0;
    const uint32_t* e = exps.data();
    for (size_t t = 0; t < coefs.size(); ++t, e += n) {
      double v = coefs[t];
      for (int i = 0; i < n; ++i) v *= powers[i * (max_e + 1) + e[i]];
      s += v;
    }
    return s;
  }
};

}  // namespace

struct ExpansionField::Impl {
  Expansion e;
  int n = 0;
  int max_deg = 0;
  double domain_radius = 1.0;
  std::vector<double> x0;

  // derivative polynomials (d^beta u)/beta! grouped by |beta|, with beta
  // enumerated in graded-lex order within each degree
  std::vector<std::vector<FlatPoly>> deriv;          // [k][index within degree k]
  std::vector<std::vector<Monomial>> deg_monomials;  // beta lists per degree
  std::vector<std::vector<double>> gram;             // per-degree monomial Gram, row-major
  std::vector<FlatPoly> grad_polys;                  // du/dx_i
  std::vector<FlatPoly> hess_polys;                  // d2u/dx_i dx_j row-major
  FlatPoly u_poly;

  std::vector<double> power_table(const std::vector<double>& z) const {
    std::vector<double> powers(n * (max_deg + 1));
    for (int i = 0; i < n; ++i) {
      powers[i * (max_deg + 1)] = 1.0;
      for (int e = 1; e <= max_deg; ++e) {
        powers[i * (max_deg + 1) + e] = powers[i * (max_deg + 1) + e - 1] * z[i];
      }
    }
    return powers;
  }

  std::vector<double> local(const std::vector<double>& x) const {
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = x[i] - x0[i];
    return z;
  }
};

ExpansionField::ExpansionField(Expansion e, double domain_radius)
    : impl_(std::make_unique<Impl>()) {
  impl_->e = std::move(e);
  const Expansion& u = impl_->e;
  impl_->n = u.dim();
  impl_->max_deg = std::max(0, u.max_degree());
  impl_->domain_radius = domain_radius;
  impl_->x0.resize(impl_->n);
  for (int i = 0; i < impl_->n; ++i) impl_->x0[i] = to_double(u.base_point()[i]);

  int n = impl_->n, D = impl_->max_deg;
  double inv_scale = 1.0 / std::sqrt(to_double(u.scale2()));

  // assemble the full polynomial sum c_k p_k once (double coefficients)
  ExactPoly total(n);
  for (const auto& [k, t] : u.terms()) total += t.poly * t.coef;
  impl_->u_poly.from_exact(total, inv_scale);

  // enumerate multi-indices per degree (graded-lex via ExactPoly maps)
  impl_->deg_monomials.resize(D + 1);
  impl_->deriv.resize(D + 1);
  impl_->gram.resize(D + 1);
  for (int k = 0; k <= D; ++k) {
    // all degree-k monomials in n vars
    std::vector<Monomial> ms;
    std::vector<uint32_t> cur(n, 0);
    auto rec = [&](auto&& self, int pos, int rem) -> void {
      if (pos == n - 1) {
        cur[pos] = rem;
        ms.emplace_back(cur);
        return;
      }
      for (int e2 = 0; e2 <= rem; ++e2) {
        cur[pos] = e2;
        self(self, pos + 1, rem - e2);
      }
    };
    rec(rec, 0, k);
    impl_->deg_monomials[k] = ms;

    // Gram matrix of sphere averages for this degree
    size_t m = ms.size();
    impl_->gram[k].assign(m * m, 0.0);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = i; j < m; ++j) {
        Monomial sum = ms[i];
        for (int t2 = 0; t2 < n; ++t2) sum.exps[t2] += ms[j].exps[t2];
        double g = to_double(sphere_average_monomial(sum, n));
        impl_->gram[k][i * m + j] = g;
        impl_->gram[k][j * m + i] = g;
      }
    }

    // derivative polynomials (d^beta u) / beta!
    impl_->deriv[k].resize(m);
    for (size_t i = 0; i < m; ++i) {
      ExactPoly d = total;
      Rational fact(1);
      for (int ax = 0; ax < n && !d.is_zero(); ++ax) {
        for (uint32_t rep = 0; rep < ms[i].exps[ax]; ++rep) d = partial(d, ax);
      }
      for (int ax = 0; ax < n; ++ax) {
        for (uint32_t rep = 2; rep <= ms[i].exps[ax]; ++rep) fact *= Rational(rep);
      }
      d *= Rational(1) / fact;
      impl_->deriv[k][i].from_exact(d, inv_scale);
    }
  }

  for (int i = 0; i < n; ++i) {
    impl_->grad_polys.emplace_back();
    impl_->grad_polys.back().from_exact(partial(total, i), inv_scale);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      impl_->hess_polys.emplace_back();
      impl_->hess_polys.back().from_exact(partial(partial(total, i), j), inv_scale);
    }
  }
}

ExpansionField::~ExpansionField() = default;

int ExpansionField::dim() const { return impl_->n; }
double ExpansionField::domain_radius() const { return impl_->domain_radius; }
const Expansion& ExpansionField::expansion() const { return impl_->e; }

double ExpansionField::value(const std::vector<double>& x) const {
  auto z = impl_->local(x);
  auto powers = impl_->power_table(z);
  return impl_->u_poly.eval(powers, impl_->max_deg);
}

std::vector<double> ExpansionField::gradient(const std::vector<double>& x) const {
  auto z = impl_->local(x);
  auto powers = impl_->power_table(z);
  std::vector<double> g(impl_->n);
  for (int i = 0; i < impl_->n; ++i) {
    g[i] = impl_->grad_polys[i].eval(powers, impl_->max_deg);
  }
  return g;
}

std::vector<double> ExpansionField::hessian(const std::vector<double>& x) const {
  auto z = impl_->local(x);
  auto powers = impl_->power_table(z);
  std::vector<double> H(impl_->n * impl_->n);
  for (size_t i = 0; i < H.size(); ++i) {
    H[i] = impl_->hess_polys[i].eval(powers, impl_->max_deg);
  }
  return H;
}

std::vector<double> ExpansionField::height_coeffs(const std::vector<double>& x) const {
  auto z = impl_->local(x);
  auto powers = impl_->power_table(z);
  std::vector<double> s(impl_->max_deg + 1, 0.0);
  std::vector<double> q;
  for (int k = 0; k <= impl_->max_deg; ++k) {
    size_t m = impl_->deriv[k].size();
    q.resize(m);
    for (size_t i = 0; i < m; ++i) {
      q[i] = impl_->deriv[k][i].eval(powers, impl_->max_deg);
    }
    const std::vector<double>& G = impl_->gram[k];
    double acc = 0.0;
    for (size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (size_t j = 0; j < m; ++j) row += G[i * m + j] * q[j];
      acc += q[i] * row;
    }
    s[k] = acc;
  }
  return s;
}

double ExpansionField::frequency_from_coeffs(const std::vector<double>& s, double r) {
  double num = 0, den = 0;
  for (size_t k = 1; k < s.size(); ++k) {
    double w = s[k] * std::pow(r, 2.0 * k);
    num += k * w;
    den += w;
  }
  if (den <= 0) return 0.0;
  return num / den;
}

double ExpansionField::height_from_coeffs(const std::vector<double>& s, double r,
                                          bool centered) {
  double h = 0;
  for (size_t k = centered ? 1 : 0; k < s.size(); ++k) {
    h += s[k] * std::pow(r, 2.0 * k);
  }
  return h;
}

int ExpansionField::vanishing_order_from_coeffs(const std::vector<double>& s) {
  double total = 0;
  for (size_t k = 1; k < s.size(); ++k) total += s[k];
  if (total <= 0) return -1;
  for (size_t k = 1; k < s.size(); ++k) {
    if (s[k] > 1e-26 * total) return static_cast<int>(k);
  }
  return -1;
}

double ExpansionField::frequency(const std::vector<double>& x, double r) const {
  return frequency_from_coeffs(height_coeffs(x), r);
}

double ExpansionField::boundary_height(const std::vector<double>& x, double r) const {
  return height_from_coeffs(height_coeffs(x), r, true);
}

double ExpansionField::boundary_mean_sq(const std::vector<double>& x, double r) const {
  return height_from_coeffs(height_coeffs(x), r, false);
}

double ExpansionField::frequency_limit_zero(const std::vector<double>& x) const {
  int k = vanishing_order_from_coeffs(height_coeffs(x));
  return k < 0 ? 0.0 : static_cast<double>(k);
}

}  // namespace almgren
