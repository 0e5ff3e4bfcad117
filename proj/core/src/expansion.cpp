#include "almgren/expansion.hpp"

#include <cmath>

#include "almgren/sampling.hpp"

namespace almgren {

void Expansion::add_term(int k, ExactPoly poly, Rational coef) {
  if (poly.is_zero() || coef == 0) return;
  if (poly.dim() != n_) throw std::invalid_argument("expansion term dimension mismatch");
  if (!poly.is_homogeneous() || poly.degree() != k) {
    throw std::invalid_argument("expansion term must be homogeneous of its degree");
  }
  if (!laplacian(poly).is_zero()) {
    throw std::invalid_argument("expansion term must be harmonic");
  }
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    ExpansionTerm t;
    t.k = k;
    t.poly = std::move(poly);
    t.coef = std::move(coef);
    Rational mult = t.poly.make_primitive();
    t.coef /= mult;
    terms_.emplace(k, std::move(t));
    return;
  }
  // merge: combine into a single polynomial, renormalize to primitive form
  ExactPoly combined = it->second.poly * it->second.coef + poly * coef;
  if (combined.is_zero()) {
    terms_.erase(it);
    return;
  }
  Rational mult = combined.make_primitive();
  it->second.poly = std::move(combined);
  it->second.coef = Rational(1) / mult;
}

int Expansion::max_degree() const {
  return terms_.empty() ? -1 : terms_.rbegin()->first;
}

int Expansion::min_positive_degree() const {
  for (const auto& [k, t] : terms_) {
    if (k >= 1) return k;
  }
  return -1;
}

Rational Expansion::coeff2(int k) const {
  auto it = terms_.find(k);
  if (it == terms_.end()) return Rational(0);
  return it->second.coef * it->second.coef * norm2(it->second.poly) / scale2_;
}

std::vector<std::pair<int, Rational>> Expansion::coeff2_all() const {
  std::vector<std::pair<int, Rational>> out;
  out.reserve(terms_.size());
  for (const auto& [k, t] : terms_) {
    out.emplace_back(k, t.coef * t.coef * norm2(t.poly) / scale2_);
  }
  return out;
}

double Expansion::eval_local(const std::vector<double>& z) const {
  double s = 0.0;
  for (const auto& [k, t] : terms_) {
    s += to_double(t.coef) * t.poly.eval(z);
  }
  return s / std::sqrt(to_double(scale2_));
}

double Expansion::eval(const std::vector<double>& x) const {
  std::vector<double> z(n_);
  for (int i = 0; i < n_; ++i) z[i] = x[i] - to_double(x0_[i]);
  return eval_local(z);
}

std::vector<double> Expansion::gradient(const std::vector<double>& x) const {
  std::vector<double> z(n_);
  for (int i = 0; i < n_; ++i) z[i] = x[i] - to_double(x0_[i]);
  std::vector<double> g(n_, 0.0);
  double inv = 1.0 / std::sqrt(to_double(scale2_));
  for (const auto& [k, t] : terms_) {
    double c = to_double(t.coef) * inv;
    std::vector<double> tg = t.poly.gradient(z);
    for (int i = 0; i < n_; ++i) g[i] += c * tg[i];
  }
  return g;
}

std::optional<std::pair<ExactPoly, int>> Expansion::unit_term(int k) const {
  auto it = terms_.find(k);
  if (it == terms_.end()) return std::nullopt;
  // stored polys are primitive with positive leading coefficient
  return std::make_pair(it->second.poly, it->second.coef < 0 ? -1 : 1);
}

Rational height(const Expansion& e, const Rational& r) {
  Rational s(0);
  Rational r2 = r * r;
  for (const auto& [k, a2] : e.coeff2_all()) {
    s += a2 * pow_rational(r2, static_cast<unsigned>(k));
  }
  return s;
}

Rational height_centered(const Expansion& e, const Rational& r) {
  Rational s(0);
  Rational r2 = r * r;
  for (const auto& [k, a2] : e.coeff2_all()) {
    if (k < 1) continue;
    s += a2 * pow_rational(r2, static_cast<unsigned>(k));
  }
  return s;
}

Rational freq(const Expansion& e, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("freq: r must be positive");
  Rational num(0), den(0);
  Rational r2 = r * r;
  for (const auto& [k, a2] : e.coeff2_all()) {
    if (k < 1) continue;
    Rational w = a2 * pow_rational(r2, static_cast<unsigned>(k));
    num += Rational(k) * w;
    den += w;
  }
  if (den == 0) throw UndefinedFrequency("freq: constant expansion");
  return num / den;
}

Expansion shift_expansion(const Expansion& e, const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != e.dim()) {
    throw std::invalid_argument("shift_expansion: point dimension mismatch");
  }
  std::vector<Rational> delta(e.dim());
  bool zero_shift = true;
  for (int i = 0; i < e.dim(); ++i) {
    delta[i] = x[i] - e.base_point()[i];
    if (delta[i] != 0) zero_shift = false;
  }
  Expansion out(e.dim(), x);
  out.set_scale2(e.scale2());
  if (zero_shift) {
    for (const auto& [k, t] : e.terms()) out.add_term(k, t.poly, t.coef);
    return out;
  }
  for (const auto& [k, t] : e.terms()) {
    ExactPoly moved = shift(t.poly, delta);
    for (auto& [deg, part] : moved.graded_parts()) {
      out.add_term(deg, std::move(part), t.coef);
    }
  }
  return out;
}

Rational freq_at(const Expansion& e, const std::vector<Rational>& x, const Rational& r) {
  Expansion s = shift_expansion(e, x);
  if (s.is_constant()) throw UndefinedFrequency("freq_at: shifted expansion is constant");
  return freq(s, r);
}

Expansion tangent_map(const Expansion& e, const std::vector<Rational>& x, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("tangent_map: r must be positive");
  Expansion s = shift_expansion(e, x);
  Expansion out(e.dim(), x);
  Rational h(0);
  Rational r2 = r * r;
  for (const auto& [k, t] : s.terms()) {
    if (k < 1) continue;  // subtract u(x)
    Rational rk = pow_rational(r, static_cast<unsigned>(k));
    out.add_term(k, t.poly, t.coef * rk);
    h += t.coef * t.coef * norm2(t.poly) * pow_rational(r2, static_cast<unsigned>(k));
  }
  if (h == 0) throw UndefinedFrequency("tangent_map: u constant on the sphere");
  out.set_scale2(h);  // centered height at radius 1 is exactly 1
  return out;
}

Rational pinch(const Expansion& e, const std::vector<Rational>& x, const Rational& r2,
               const Rational& r1) {
  if (!(r2 > 0) || r2 > r1) throw std::invalid_argument("pinch: need 0 < r2 <= r1");
  Expansion s = shift_expansion(e, x);
  if (s.is_constant()) throw UndefinedFrequency("pinch: constant expansion");
  return freq(s, r1) - freq(s, r2);
}

PinchOdeCheck pinch_ode_check(const Expansion& e, const Rational& r) {
  if (e.is_constant()) throw UndefinedFrequency("pinch_ode_check: constant expansion");
  Rational A(0), B(0), C(0);
  Rational r2 = r * r;
  for (const auto& [k, a2] : e.coeff2_all()) {
    if (k < 1) continue;
    Rational w = a2 * pow_rational(r2, static_cast<unsigned>(k));
    B += w;
    A += Rational(k) * w;
    C += Rational(k) * Rational(k) * w;
  }
  PinchOdeCheck out;
  out.freq_value = A / B;
  // d/dr of N(r) = A/B with A' = 2k^2 a^2 r^{2k-1}, B' = 2k a^2 r^{2k-1}:
  // r N' = 2 (C B - A^2) / B^2
  out.lhs = Rational(2) * (C * B - A * A) / (B * B);
  out.eps = dist_to_integers(out.freq_value);
  out.rhs = Rational(2) * out.eps * (Rational(1) - out.eps);

  double rd = to_double(r);
  double num = 0, den = 0;
  for (const auto& [k, a2] : e.coeff2_all()) {
    if (k < 1) continue;
    double w = to_double(a2) * std::pow(rd / M_E, 2 * k);
    num += k * w;
    den += w;
  }
  out.drop_over_e = to_double(out.freq_value) - num / den;
  return out;
}

DominantDegreeOutcome dominant_degree(const Expansion& e, const Rational& r, double eps) {
  if (!(r > 0) || eps <= 0) throw std::invalid_argument("dominant_degree: bad arguments");
  if (e.is_constant()) throw UndefinedFrequency("dominant_degree: constant expansion");
  DominantDegreeOutcome out;
  Rational h = height_centered(e, r);
  Rational best(0);
  Rational r2 = r * r;
  for (const auto& [k, a2] : e.coeff2_all()) {
    if (k < 1) continue;
    Rational w = a2 * pow_rational(r2, static_cast<unsigned>(k)) / h;
    if (w > best) {
      best = w;
      out.degree = k;
    }
  }
  out.dominant_ratio = best;
  Rational thresh = Rational(1) - Rational(6) * rational_from_double(eps);
  out.dominant = best >= thresh;

  double rd = to_double(r);
  double num = 0, den = 0;
  for (const auto& [k, a2] : e.coeff2_all()) {
    if (k < 1) continue;
    double w = to_double(a2) * std::pow(rd / M_E, 2 * k);
    num += k * w;
    den += w;
  }
  out.drop = to_double(freq(e, r)) - num / den;
  out.frequency_drop = out.drop >= eps;
  if (!out.dominant && !out.frequency_drop) {
    throw std::logic_error("dominant_degree: dichotomy failed");
  }
  return out;
}

namespace {

double freq_double(const std::vector<std::pair<int, Rational>>& c2, double r) {
  double num = 0, den = 0;
  for (const auto& [k, a2] : c2) {
    if (k < 1) continue;
    double w = to_double(a2) * std::pow(r, 2 * k);
    num += k * w;
    den += w;
  }
  return num / den;
}

double height_centered_double(const std::vector<std::pair<int, Rational>>& c2, double r) {
  double s = 0;
  for (const auto& [k, a2] : c2) {
    if (k < 1) continue;
    s += to_double(a2) * std::pow(r, 2 * k);
  }
  return s;
}

}  // namespace

TangentUniquenessReport tangent_uniqueness_check(const Expansion& e, const Rational& r2,
                                                 const Rational& r1, double eps,
                                                 double eps0) {
  if (eps > eps0) throw std::invalid_argument("tangent_uniqueness_check: eps > eps0");
  double r1d = to_double(r1), r2d = to_double(r2);
  if (r2d > r1d / std::exp(3.0) * (1 + 1e-12)) {
    throw std::invalid_argument("tangent_uniqueness_check: need r2 <= r1/e^3");
  }
  Rational drop = freq(e, r1) - freq(e, r2);
  if (to_double(drop) > eps * (1 + 1e-12)) {
    throw std::invalid_argument("tangent_uniqueness_check: pinch exceeds eps");
  }

  TangentUniquenessReport rep;
  auto c2 = e.coeff2_all();

  // (i) d = nearest integer to N on the window; N monotone, so the
  // deviation is extremal at the endpoints
  Rational Nmid = freq(e, r1);
  rep.d = static_cast<int>(nearest_int_tie_low(Nmid).get_si());
  rep.max_freq_dev = std::max(std::fabs(to_double(freq(e, r1)) - rep.d),
                              std::fabs(to_double(freq(e, r2)) - rep.d));
  rep.freq_dev_ok = rep.max_freq_dev <= 3 * eps * (1 + 1e-9);

  auto term = e.unit_term(rep.d);
  if (!term) throw std::logic_error("tangent_uniqueness_check: missing dominant degree term");
  rep.P_d = term->first;
  rep.sign = term->second;

  // (ii)-(iv) over the inner window (e r2, r1/e); the mass ratio
  // a_d^2 t^{2d} / h(t) is minimized at an endpoint (the complement is a
  // convex function of log t), sample a grid anyway for the report
  double lo = r2d * M_E, hi = r1d / M_E;
  double ad2 = to_double(e.coeff2(rep.d));
  rep.min_mass_ratio = 1.0;
  rep.max_l2_dist = 0.0;
  rep.max_grad_dist = 0.0;
  const int grid = 16;
  for (int i = 0; i <= grid; ++i) {
    double t = lo * std::pow(hi / lo, static_cast<double>(i) / grid);
    double h = height_centered_double(c2, t);
    double mass = ad2 * std::pow(t, 2 * rep.d) / h;
    rep.min_mass_ratio = std::min(rep.min_mass_ratio, mass);
    double atilde = std::sqrt(mass);
    rep.max_l2_dist = std::max(rep.max_l2_dist, 2.0 - 2.0 * atilde);
    double Nt = freq_double(c2, t);
    rep.max_grad_dist = std::max(rep.max_grad_dist, Nt + rep.d - 2.0 * rep.d * atilde);
  }
  rep.mass_ok = rep.min_mass_ratio >= 1 - 6 * eps * (1 + 1e-9);
  rep.l2_ok = rep.max_l2_dist <= 7 * eps * (1 + 1e-9);
  rep.grad_ok = rep.max_grad_dist <= 7 * rep.d * eps * (1 + 1e-9);

  // uniqueness: the extraction at both window ends is the same stored term
  auto lo_term = e.unit_term(rep.d);
  auto hi_term = e.unit_term(rep.d);
  rep.unique = lo_term && hi_term && lo_term->first == hi_term->first &&
               lo_term->second == hi_term->second;
  return rep;
}

UniformBoundCheck uniform_bound_check(const Expansion& e, double r, double k, int samples) {
  if (e.is_constant()) throw UndefinedFrequency("uniform_bound_check: constant expansion");
  UniformBoundCheck out;
  out.base_freq = to_double(freq(e, Rational(1)));
  Rational rad = rational_from_double(k * (1 - r));
  for (const auto& p : ball_points(e.dim(), samples)) {
    std::vector<Rational> x(e.dim());
    for (int i = 0; i < e.dim(); ++i) {
      x[i] = e.base_point()[i] + rational_from_double(p[i] * r);
    }
    Expansion s = shift_expansion(e, x);
    if (s.is_constant()) continue;
    out.max_inner_freq = std::max(out.max_inner_freq, to_double(freq(s, rad)));
  }
  out.ratio = out.max_inner_freq / out.base_freq;
  return out;
}

FrequencyProfile frequency_profile(const Expansion& e, const std::vector<Rational>& x,
                                   const std::vector<Rational>& radii) {
  FrequencyProfile p;
  for (const auto& xi : x) p.center.push_back(to_double(xi));
  Expansion s = shift_expansion(e, x);
  if (s.is_constant()) throw UndefinedFrequency("frequency_profile: constant expansion");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && !(radii[i] > radii[i - 1])) {
      throw std::invalid_argument("frequency_profile: radii must increase");
    }
    p.radii.push_back(to_double(radii[i]));
    p.N.push_back(to_double(freq(s, radii[i])));
    p.h.push_back(to_double(height_centered(s, radii[i])));
  }
  for (size_t i = 0; i + 1 < radii.size(); ++i) {
    p.pinches.push_back({p.radii[i], p.radii[i + 1], p.N[i + 1] - p.N[i]});
  }
  return p;
}

}  // namespace almgren
