#include "almgren/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "almgren/hhp.hpp"
#include "almgren/sampling.hpp"

namespace almgren {

size_t SetMask::member_count() const {
  size_t c = 0;
  for (uint8_t m : members) c += m;
  return c;
}

std::vector<double> SetMask::cell_center(size_t flat) const {
  std::vector<double> x(n);
  for (int a = n - 1; a >= 0; --a) {
    size_t e = static_cast<size_t>(extents[a]);
    x[a] = origin[a] + (static_cast<double>(flat % e) + 0.5) * spacing;
    flat /= e;
  }
  return x;
}

namespace {

double norm2v(const std::vector<double>& v) {
  double s = 0;
  for (double t : v) s += t * t;
  return s;
}

// one Newton step toward the zero of grad u (critical/singular kinds) or of
// u itself (nodal), clamped into B_r(center)
std::vector<double> newton_step(const FieldEvaluator& f, const std::vector<double>& y,
                                const std::vector<double>& center, double r, bool on_value) {
  int n = f.dim();
  std::vector<double> g = f.gradient(y);
  std::vector<double> step(n, 0.0);
  if (on_value) {
    double u = f.value(y);
    double g2 = norm2v(g);
    if (g2 < 1e-30) return y;
    for (int i = 0; i < n; ++i) step[i] = -u * g[i] / g2;
  } else {
    std::vector<double> H = f.hessian(y);
    Eigen::MatrixXd He(n, n);
    Eigen::VectorXd ge(n);
    for (int i = 0; i < n; ++i) {
      ge(i) = g[i];
      for (int j = 0; j < n; ++j) He(i, j) = H[i * n + j];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(He);
    if (!lu.isInvertible()) return y;
    Eigen::VectorXd d = lu.solve(-ge);
    for (int i = 0; i < n; ++i) step[i] = d(i);
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = y[i] + step[i];
  // clamp to the sampling ball
  double d2 = 0;
  for (int i = 0; i < n; ++i) d2 += (out[i] - center[i]) * (out[i] - center[i]);
  if (d2 > r * r) {
    double sc = r / std::sqrt(d2);
    for (int i = 0; i < n; ++i) out[i] = center[i] + (out[i] - center[i]) * sc;
  }
  return out;
}

double objective(const FieldEvaluator& f, const std::vector<double>& y, EffSetKind kind,
                 double r) {
  switch (kind) {
    case EffSetKind::Critical:
      return norm2v(f.gradient(y));
    case EffSetKind::Singular: {
      double u = f.value(y);
      return u * u + r * r / f.dim() * norm2v(f.gradient(y));
    }
    case EffSetKind::Nodal: {
      double u = f.value(y);
      return u * u;
    }
    default:
      return 0.0;
  }
}

SetMask make_grid(int n, const GridSpec& grid, double r) {
  if (grid.spacing <= 0) throw std::invalid_argument("grid spacing must be positive");
  if (grid.spacing > r / 4 * (1 + 1e-9)) {
    throw std::invalid_argument("grid spacing must be <= r/4");
  }
  SetMask mask;
  mask.n = n;
  mask.spacing = grid.spacing;
  mask.r = r;
  int cells = static_cast<int>(std::ceil(2 * grid.half_extent / grid.spacing - 1e-9));
  size_t total = 1;
  for (int a = 0; a < n; ++a) {
    mask.extents.push_back(cells);
    mask.origin.push_back(-grid.half_extent);
    total *= cells;
  }
  mask.members.assign(total, 0);
  return mask;
}

}  // namespace

SetMask effective_set(const FieldEvaluator& f, double r, EffSetKind kind,
                      const GridSpec& grid, const Config& cfg) {
  int n = f.dim();
  SetMask mask = make_grid(n, grid, r);
  const double dom = f.domain_radius();
  const int n_samples = cfg.ball_inf_samples_per_dim * n;
  const auto unit_ball = ball_points(n, n_samples);
  const auto coarse_ball = ball_points(n, 2 * n + 8);

  parallel_for(mask.cell_count(), cfg.jobs, [&](size_t idx) {
    std::vector<double> x = mask.cell_center(idx);
    double nx = std::sqrt(norm2v(x));
    if (nx > grid.half_extent + 1e-12) return;
    if (nx + 2 * r > dom + 1e-12) return;

    if (kind == EffSetKind::FrequencyS) {
      mask.members[idx] = f.frequency(x, r) >= 1.5 ? 1 : 0;
      return;
    }

    double threshold;
    if (kind == EffSetKind::Critical) {
      threshold = n / (16.0 * r * r) * f.boundary_height(x, 2 * r);
    } else if (kind == EffSetKind::Singular) {
      threshold = f.boundary_mean_sq(x, 2 * r) / 16.0;
    } else {
      threshold = cfg.eps_nodal * f.boundary_mean_sq(x, 2 * r);
    }
    if (threshold <= 0) return;

    std::vector<double> y(n);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_y;
    // cheap pre-scan in dimension >= 3; a coarse minimum far above the
    // threshold cannot be pulled below it by the fine pass
    if (n >= 3) {
      double coarse = std::numeric_limits<double>::infinity();
      for (const auto& p : coarse_ball) {
        for (int i = 0; i < n; ++i) y[i] = x[i] + r * p[i];
        coarse = std::min(coarse, objective(f, y, kind, r));
      }
      if (coarse > 16.0 * threshold) return;
    }
    for (const auto& p : unit_ball) {
      for (int i = 0; i < n; ++i) y[i] = x[i] + r * p[i];
      double v = objective(f, y, kind, r);
      if (v < best) {
        best = v;
        best_y = y;
      }
    }
    if (!best_y.empty()) {
      std::vector<double> polished =
          newton_step(f, best_y, x, r, kind == EffSetKind::Nodal);
      best = std::min(best, objective(f, polished, kind, r));
    }
    mask.members[idx] = best < threshold ? 1 : 0;
  });
  return mask;
}

SetMask effective_nodal_set(const FieldEvaluator& f, double r, double eps_n,
                            const GridSpec& grid, const Config& cfg) {
  Config local = cfg;
  local.eps_nodal = eps_n;
  return effective_set(f, r, EffSetKind::Nodal, grid, local);
}

double critical_radius(const FieldEvaluator& f, const std::vector<double>& x, double r0,
                       double rel_tol) {
  if (f.frequency(x, r0) < 1.5) return r0;
  if (f.frequency_limit_zero(x) >= 1.5) return 0.0;
  double hi = r0, lo = r0;
  while (f.frequency(x, lo) >= 1.5) {
    hi = lo;
    lo /= 2;
    if (lo < 1e-14) return 0.0;
  }
  while ((hi - lo) > rel_tol * hi) {
    double mid = 0.5 * (hi + lo);
    (f.frequency(x, mid) < 1.5 ? lo : hi) = mid;
  }
  return lo;
}

double d_critical_radius(const FieldEvaluator& f, const std::vector<double>& x, int d,
                         double eps0, double r0, const Config& cfg) {
  const auto ball = ball_points(f.dim(), cfg.d_critical_samples);
  auto ok = [&](double s) {
    std::vector<double> y(f.dim());
    for (const auto& p : ball) {
      for (int i = 0; i < f.dim(); ++i) y[i] = x[i] + s * p[i];
      if (f.frequency(y, s) >= d + eps0) return false;
    }
    return true;
  };
  if (ok(r0)) return r0;
  double hi = r0, lo = r0;
  while (!ok(lo)) {
    hi = lo;
    lo /= 2;
    if (lo < 1e-14) return 0.0;
  }
  while ((hi - lo) > cfg.bisect_rel_tol * hi) {
    double mid = 0.5 * (hi + lo);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

namespace {

// Felzenszwalb-Huttenlocher 1-D squared distance transform
void dt_1d(std::vector<double>& f) {
  const int m = static_cast<int>(f.size());
  std::vector<int> v(m);
  std::vector<double> z(m + 1), out(m);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < m; ++q) {
    double s;
    for (;;) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < m; ++q) {
    while (z[k + 1] < q) ++k;
    out[q] = (q - v[k]) * static_cast<double>(q - v[k]) + f[v[k]];
  }
  f.swap(out);
}

}  // namespace

double minkowski_volume(const SetMask& mask, double r) {
  if (mask.cell_count() == 0) throw std::invalid_argument("minkowski_volume: empty domain");
  if (mask.spacing > r / 4 * (1 + 1e-9)) {
    throw std::invalid_argument("minkowski_volume: mask spacing must be <= r/4");
  }
  if (mask.member_count() == 0) return 0.0;
  const double INF = 1e30;
  std::vector<double> dist(mask.cell_count());
  for (size_t i = 0; i < dist.size(); ++i) dist[i] = mask.members[i] ? 0.0 : INF;

  // separable transform over every axis
  int n = mask.n;
  std::vector<size_t> strides(n, 1);
  for (int a = n - 2; a >= 0; --a) {
    strides[a] = strides[a + 1] * static_cast<size_t>(mask.extents[a + 1]);
  }
  std::vector<double> line;
  for (int a = 0; a < n; ++a) {
    size_t len = static_cast<size_t>(mask.extents[a]);
    size_t stride = strides[a];
    size_t lines = mask.cell_count() / len;
    line.resize(len);
    for (size_t l = 0; l < lines; ++l) {
      // flat index of line start: expand l skipping axis a
      size_t rem = l, base = 0;
      for (int b = n - 1; b >= 0; --b) {
        if (b == a) continue;
        size_t e = static_cast<size_t>(mask.extents[b]);
        base += (rem % e) * strides[b];
        rem /= e;
      }
      for (size_t i = 0; i < len; ++i) line[i] = dist[base + i * stride];
      dt_1d(line);
      for (size_t i = 0; i < len; ++i) dist[base + i * stride] = line[i];
    }
  }
  const double thr = (r / mask.spacing) * (r / mask.spacing) * (1 + 1e-12);
  size_t count = 0;
  for (double d : dist) {
    if (d <= thr) ++count;
  }
  return static_cast<double>(count) * std::pow(mask.spacing, n);
}

std::vector<CriticalPoint2d> critical_points_2d(const Expansion& e, double radius) {
  if (e.dim() != 2) throw std::invalid_argument("critical_points_2d: need n = 2");
  if (e.is_constant()) throw std::invalid_argument("critical_points_2d: constant expansion");
  using cplx = std::complex<double>;
  int D = e.max_degree();
  // holomorphic representative: u = Re(f), f(z) = sum c_k z^k
  std::vector<cplx> c(D + 1, cplx(0, 0));
  for (const auto& [k, t] : e.terms()) {
    if (k == 0) continue;
    HhpBasis b2 = basis_2d(k);
    // u_k = coef * p = x * Re_k + y * Im_k with Re_k = 2 r^k cos, Im_k = 2 r^k sin
    Rational xr = t.coef * inner(t.poly, b2.elements[1]) / b2.norm2[1];
    Rational yr = t.coef * inner(t.poly, b2.elements[0]) / b2.norm2[0];
    c[k] = cplx(2 * to_double(xr), -2 * to_double(yr));
  }
  // g = f' has coefficients (k+1) c_{k+1}
  std::vector<cplx> g;
  for (int k = 1; k <= D; ++k) g.push_back(static_cast<double>(k) * c[k]);
  while (!g.empty() && std::abs(g.back()) < 1e-14) g.pop_back();
  std::vector<CriticalPoint2d> out;
  if (g.size() <= 1) {
    return out;  // constant or zero derivative has no isolated roots
  }
  int m = static_cast<int>(g.size()) - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -g[i] / g[m];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);

  auto geval = [&](cplx z) {
    cplx v(0, 0);
    for (int k = m; k >= 0; --k) v = v * z + g[k];
    return v;
  };
  auto gderiv = [&](cplx z) {
    cplx v(0, 0);
    for (int k = m; k >= 1; --k) v = v * z + static_cast<double>(k) * g[k];
    return v;
  };

  std::vector<cplx> roots;
  for (int i = 0; i < m; ++i) {
    cplx z = es.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      cplx dg = gderiv(z);
      if (std::abs(dg) < 1e-9) break;
      cplx step = geval(z) / dg;
      if (!std::isfinite(step.real()) || std::abs(step) > 0.5) break;
      z -= step;
    }
    roots.push_back(z);
  }
  // cluster into multiplicities
  std::vector<std::pair<cplx, int>> clusters;
  for (const cplx& z : roots) {
    bool merged = false;
    for (auto& [center, mult] : clusters) {
      if (std::abs(z - center) < 1e-6 * std::max(1.0, std::abs(center))) {
        center = (center * static_cast<double>(mult) + z) / static_cast<double>(mult + 1);
        ++mult;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.emplace_back(z, 1);
  }
  for (const auto& [z, mult] : clusters) {
    if (std::abs(z) >= radius) continue;
    CriticalPoint2d p;
    p.x = z.real() + to_double(e.base_point()[0]);
    p.y = z.imag() + to_double(e.base_point()[1]);
    p.multiplicity = mult;
    out.push_back(p);
  }
  return out;
}

InclusionReport frequency_inclusion_check(const FieldEvaluator& f, double r, double C,
                                          const SetMask& mask) {
  InclusionReport rep;
  double r0 = 0.5 * f.domain_radius();
  for (size_t i = 0; i < mask.cell_count(); ++i) {
    if (!mask.members[i]) continue;
    ++rep.members;
    double rc = critical_radius(f, mask.cell_center(i), r0);
    rep.min_workable_C = std::max(rep.min_workable_C, rc / r);
  }
  rep.holds = rep.min_workable_C <= C;
  return rep;
}

NodalReport nodal_nondegeneracy_check(const Expansion& e, double eps, double tau,
                                      const Config& cfg) {
  NodalReport rep;
  rep.tau = tau;
  // unnormalized frequency at scale 1: constant term stays in the sums
  Rational num(0), den(0);
  for (const auto& [k, a2] : e.coeff2_all()) {
    num += Rational(k) * a2;
    den += a2;
  }
  if (den == 0) throw std::invalid_argument("nodal_nondegeneracy_check: zero expansion");
  if (num / den <= Rational(1, 2)) {
    rep.center_bound_checked = true;
    rep.u0_sq = e.coeff2(0);
    rep.half_height = height(e, Rational(1)) / 2;
    rep.center_bound_holds = rep.u0_sq >= rep.half_height;
  }

  if (e.is_constant()) return rep;
  Rational r_lo = rational_from_double(std::exp(-2.0));
  Rational r_hi = rational_from_double(std::exp(2.0));
  double pinch_val = to_double(freq(e, r_hi) - freq(e, r_lo));
  double N1 = to_double(freq(e, Rational(1)));
  if (pinch_val <= eps && std::fabs(N1 - 1.0) < 0.5) {
    auto t1 = e.terms().find(1);
    if (t1 != e.terms().end()) {
      rep.plane_checked = true;
      int n = e.dim();
      std::vector<double> L(n, 0.0);
      for (int i = 0; i < n; ++i) {
        std::vector<uint32_t> exps(n, 0);
        exps[i] = 1;
        L[i] = to_double(t1->second.coef * t1->second.poly.coeff(Monomial(exps)));
      }
      double Ln = std::sqrt(norm2v(L));
      rep.plane_normal = L;
      // off the plane the linear part has a definite sign on each side; u
      // is zero-free there iff it never disagrees with that side
      bool ok = true;
      for (const auto& p : ball_points(n, cfg.sphere_samples_per_dim)) {
        double ell = 0;
        for (int i = 0; i < n; ++i) ell += L[i] * p[i];
        if (std::fabs(ell) / Ln <= tau) continue;
        double u = e.eval_local(p);
        if (u * ell <= 0) {
          ok = false;
          break;
        }
      }
      rep.no_zero_off_plane = ok;
    }
  }
  return rep;
}

}  // namespace almgren
