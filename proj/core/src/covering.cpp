#include "almgren/covering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "almgren/geometry.hpp"
#include "almgren/sampling.hpp"

namespace almgren {

const char* to_string(BallStatus s) {
  switch (s) {
    case BallStatus::GoodScale: return "good-scale";
    case BallStatus::TerminalR: return "terminal-r";
    case BallStatus::BadSet: return "bad-set";
    case BallStatus::Excluded: return "excluded";
  }
  return "?";
}

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// candidate points of S_r with cached height coefficients (fast frequency
// evaluation at any scale when the field is expansion-backed)
struct CandidateSet {
  const FieldEvaluator* f = nullptr;
  const ExpansionField* ef = nullptr;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> coeffs;

  double freq(size_t i, double s) const {
    if (ef) return ExpansionField::frequency_from_coeffs(coeffs[i], s);
    return f->frequency(points[i], s);
  }
  double vanish(size_t i) const {
    if (ef) {
      int k = ExpansionField::vanishing_order_from_coeffs(coeffs[i]);
      return k < 0 ? 0.0 : k;
    }
    return f->frequency_limit_zero(points[i]);
  }
};

// crossing of N(x_i, .) = d - eps using cached coefficients
std::pair<double, double> r_prime_cached(const CandidateSet& cand, size_t i, int d,
                                         double eps, double r, double smax,
                                         double rel_tol) {
  double target = d - eps;
  if (cand.freq(i, smax) < target) return {smax, std::max(smax, r)};
  if (cand.vanish(i) >= target) return {0.0, r};
  double hi = smax, lo = smax;
  while (cand.freq(i, lo) >= target) {
    hi = lo;
    lo /= 2;
    if (lo < 1e-14) return {0.0, r};
  }
  while ((hi - lo) > rel_tol * hi) {
    double mid = 0.5 * (hi + lo);
    (cand.freq(i, mid) < target ? lo : hi) = mid;
  }
  return {lo, std::max(lo, r)};
}

struct PlaneFit {
  std::vector<double> mean;
  Eigen::MatrixXd basis;  // n x (n-2) orthonormal columns
  bool valid = false;
};

struct StepDiagnostics {
  size_t alignment_failures = 0;
  size_t excluded_certificates = 0;
  double required_shrink = std::numeric_limits<double>::infinity();
};

// one cover step; `region` is the radius within which the ball's candidate
// points live (the 5x dilation of the Vitali radius for child balls)
std::vector<ScaleBall> cover_step(const FieldEvaluator& f, const CandidateSet& cand,
                                  const std::vector<size_t>& in_ball,
                                  const ScaleBall& ball, double region, int d, double r,
                                  double eps, const Config& cfg, StepDiagnostics* diag) {
  std::vector<ScaleBall> out;
  if (in_ball.empty()) return out;
  const int n = f.dim();
  const double smax = ball.scale > 0 ? ball.scale : region;

  std::vector<double> rp(in_ball.size()), rx(in_ball.size());
  for (size_t s = 0; s < in_ball.size(); ++s) {
    auto pr = r_prime_cached(cand, in_ball[s], d, eps, r, smax, cfg.bisect_rel_tol);
    rp[s] = pr.first;
    rx[s] = pr.second;
  }

  auto make_terminal = [&](const std::vector<double>& c) {
    ScaleBall b;
    b.center = c;
    b.radius = r;
    b.degree = d;
    b.status = BallStatus::TerminalR;
    b.scale = r;
    return b;
  };
  auto make_next = [&](const std::vector<double>& c, double radius, BallStatus st,
                       double next_scale) {
    ScaleBall b;
    b.center = c;
    b.radius = radius;
    b.degree = d - 1;
    b.status = st;
    b.scale = next_scale;
    return b;
  };
  const double drop = eps / (1.0 - eps);

  // improved 2-D step: a single minimizer ball suffices when its dilation
  // already covers every sample
  if (n == 2) {
    size_t best = 0;
    for (size_t s = 1; s < in_ball.size(); ++s) {
      if (rx[s] < rx[best] ||
          (rx[s] == rx[best] &&
           cand.points[in_ball[s]] < cand.points[in_ball[best]])) {
        best = s;
      }
    }
    bool covers = true;
    for (size_t s = 0; s < in_ball.size(); ++s) {
      if (dist(cand.points[in_ball[s]], cand.points[in_ball[best]]) >
          cfg.vitali_dilation * rx[best]) {
        covers = false;
        break;
      }
    }
    if (covers) {
      const auto& c = cand.points[in_ball[best]];
      if (rp[best] <= r) {
        out.push_back(make_terminal(c));
      } else {
        out.push_back(make_next(c, rx[best], BallStatus::GoodScale, eps * rx[best]));
      }
      return out;
    }
  }

  // S_g / S_b partition over the finite sample
  std::vector<std::vector<double>> pts;
  pts.reserve(in_ball.size());
  for (size_t idx : in_ball) pts.push_back(cand.points[idx]);
  GoodBadPartition part =
      partition_good_bad(pts, rx, cfg.vitali_dilation, cfg.good_ratio);

  // Vitali subcover of the good set
  std::vector<Ball> good_balls;
  for (size_t gi : part.good) good_balls.push_back({pts[gi], rx[gi]});
  std::vector<size_t> kept = vitali(good_balls);

  const double family_scale = region / (std::exp(3.0) * std::max(1, d));
  std::vector<size_t> small_kept;  // indices into `kept` with r_i below the family scale
  for (size_t k = 0; k < kept.size(); ++k) {
    if (good_balls[kept[k]].radius <= family_scale) small_kept.push_back(k);
  }

  // subfamilies: connected components under pairwise distance <= family_scale
  std::vector<int> comp(small_kept.size(), -1);
  int ncomp = 0;
  for (size_t a = 0; a < small_kept.size(); ++a) {
    if (comp[a] >= 0) continue;
    comp[a] = ncomp;
    std::vector<size_t> stack{a};
    while (!stack.empty()) {
      size_t cur = stack.back();
      stack.pop_back();
      for (size_t b = 0; b < small_kept.size(); ++b) {
        if (comp[b] >= 0) continue;
        if (dist(good_balls[kept[small_kept[cur]]].center,
                 good_balls[kept[small_kept[b]]].center) <= family_scale) {
          comp[b] = ncomp;
          stack.push_back(b);
        }
      }
    }
    ++ncomp;
  }

  // least-squares n-2 plane through each subfamily's centers, with the
  // graph-alignment check (replaces the proof's Lipschitz extension)
  std::vector<PlaneFit> planes(ncomp);
  if (n >= 3) {
    for (int cidx = 0; cidx < ncomp; ++cidx) {
      std::vector<size_t> members;
      for (size_t a = 0; a < small_kept.size(); ++a) {
        if (comp[a] == cidx) members.push_back(small_kept[a]);
      }
      if (members.size() < 2) continue;
      Eigen::MatrixXd X(members.size(), n);
      for (size_t m = 0; m < members.size(); ++m) {
        for (int j = 0; j < n; ++j) X(m, j) = good_balls[kept[members[m]]].center[j];
      }
      Eigen::RowVectorXd mean = X.colwise().mean();
      Eigen::MatrixXd centered = X.rowwise() - mean;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
      PlaneFit& pf = planes[cidx];
      pf.basis = svd.matrixV().leftCols(n - 2);
      pf.mean.assign(mean.data(), mean.data() + n);
      pf.valid = true;
      double diameter = 0, max_off = 0;
      for (size_t a = 0; a < members.size(); ++a) {
        for (size_t b = a + 1; b < members.size(); ++b) {
          diameter = std::max(diameter, dist(good_balls[kept[members[a]]].center,
                                             good_balls[kept[members[b]]].center));
        }
        Eigen::VectorXd v = centered.row(a).transpose();
        Eigen::VectorXd proj = pf.basis * (pf.basis.transpose() * v);
        max_off = std::max(max_off, (v - proj).norm());
      }
      if (members.size() >= 3 && diameter > 0 && max_off > cfg.cover_tau * diameter) {
        if (diag) ++diag->alignment_failures;
      }
    }
  }

  // emit good-set balls
  for (size_t ki = 0; ki < kept.size(); ++ki) {
    size_t gi = part.good[kept[ki]];
    if (rp[gi] <= r) {
      out.push_back(make_terminal(pts[gi]));
    } else {
      out.push_back(make_next(pts[gi], rx[gi], BallStatus::GoodScale,
                              drop * rx[gi] / cfg.good_ratio));
    }
  }

  // bad set: dyadic-annulus covering with t_y = min_i d(y, x_i) / 55
  if (!part.bad.empty()) {
    std::vector<Ball> bad_balls;
    std::vector<size_t> bad_sel;
    for (size_t bi : part.bad) {
      double t;
      if (kept.empty()) {
        t = rx[bi];
      } else {
        t = std::numeric_limits<double>::infinity();
        for (size_t ki = 0; ki < kept.size(); ++ki) {
          size_t gi = part.good[kept[ki]];
          t = std::min(t, dist(pts[bi], pts[gi]) / cfg.bad_margin);
        }
        if (!(t > 0)) t = r;
      }
      bad_balls.push_back({pts[bi], std::max(t, r / cfg.vitali_dilation)});
      bad_sel.push_back(bi);
    }
    std::vector<size_t> kept_bad = vitali(bad_balls);
    for (size_t kb : kept_bad) {
      const Ball& b = bad_balls[kb];
      if (b.radius <= r) {
        out.push_back(make_terminal(b.center));
      } else {
        out.push_back(make_next(b.center, b.radius, BallStatus::BadSet,
                                drop * cfg.vitali_dilation * b.radius));
      }
    }

    // exclusion certificates on the dim V = n-2 branch: far-from-plane bad
    // cells should have a definite critical radius (prop_heffcrit shape)
    if (n >= 3 && diag) {
      for (size_t bi : part.bad) {
        // nearest kept good ball
        double best_d = std::numeric_limits<double>::infinity();
        size_t best_k = 0;
        for (size_t ki = 0; ki < kept.size(); ++ki) {
          double dd = dist(pts[bi], good_balls[kept[ki]].center);
          if (dd < best_d) {
            best_d = dd;
            best_k = ki;
          }
        }
        if (!std::isfinite(best_d)) continue;
        double ri = good_balls[kept[best_k]].radius;
        if (!(cfg.vitali_dilation * ri < best_d && best_d < family_scale)) continue;
        // plane of the subfamily that kept ball belongs to
        const PlaneFit* pf = nullptr;
        for (size_t a = 0; a < small_kept.size(); ++a) {
          if (small_kept[a] == best_k && planes[comp[a]].valid) pf = &planes[comp[a]];
        }
        if (!pf) continue;
        Eigen::VectorXd v(n);
        for (int j = 0; j < n; ++j) {
          v(j) = pts[bi][j] - good_balls[kept[best_k]].center[j];
        }
        Eigen::VectorXd proj = pf->basis * (pf->basis.transpose() * v);
        double off = (v - proj).norm();
        if (off <= cfg.cover_tau * best_d) continue;
        double rc = critical_radius(f, pts[bi], smax, cfg.bisect_rel_tol);
        if (ri > 0) diag->required_shrink = std::min(diag->required_shrink, rc / ri);
        if (rc >= std::pow(cfg.shrink_tau, d) * ri) ++diag->excluded_certificates;
      }
    }
  }
  return out;
}

CandidateSet build_candidates(const FieldEvaluator& f, const std::vector<double>& center,
                              double radius, double r, const Config& cfg) {
  CandidateSet cand;
  cand.f = &f;
  cand.ef = dynamic_cast<const ExpansionField*>(&f);
  const int n = f.dim();
  const double spacing = r / 4;
  const int cells = static_cast<int>(std::ceil(2 * radius / spacing));
  size_t total = 1;
  for (int a = 0; a < n; ++a) total *= cells;

  std::vector<uint8_t> keep(total, 0);
  std::vector<std::vector<double>> coeff_buf(cand.ef ? total : 0);
  parallel_for(total, cfg.jobs, [&](size_t idx) {
    std::vector<double> x(n);
    size_t rem = idx;
    for (int a = n - 1; a >= 0; --a) {
      x[a] = center[a] - radius + (static_cast<double>(rem % cells) + 0.5) * spacing;
      rem /= cells;
    }
    if (dist(x, center) > radius) return;
    if (cand.ef) {
      auto s = cand.ef->height_coeffs(x);
      if (ExpansionField::frequency_from_coeffs(s, r) >= 1.5) {
        coeff_buf[idx] = std::move(s);
        keep[idx] = 1;
      }
    } else if (f.frequency(x, r) >= 1.5) {
      keep[idx] = 1;
    }
  });
  for (size_t idx = 0; idx < total; ++idx) {
    if (!keep[idx]) continue;
    std::vector<double> x(n);
    size_t rem = idx;
    for (int a = n - 1; a >= 0; --a) {
      x[a] = center[a] - radius + (static_cast<double>(rem % cells) + 0.5) * spacing;
      rem /= cells;
    }
    cand.points.push_back(std::move(x));
    if (cand.ef) cand.coeffs.push_back(std::move(coeff_buf[idx]));
  }
  return cand;
}

}  // namespace

bool is_good_scale(const FieldEvaluator& f, const std::vector<double>& x, double t, int d,
                   double eps, const Config& cfg) {
  if (dist(x, std::vector<double>(x.size(), 0.0)) + 2 * t >
      f.domain_radius() * (1 + 1e-9)) {
    throw std::invalid_argument("is_good_scale: B(x, 2t) leaves the domain");
  }
  int n = f.dim();
  double want = std::pow(cfg.good_scale_samples_base, n);
  int count = static_cast<int>(std::min<double>(want, cfg.good_scale_samples_cap));
  std::vector<double> y(n);
  for (const auto& p : ball_points(n, count)) {
    for (int i = 0; i < n; ++i) y[i] = x[i] + t * p[i];
    if (f.frequency(y, t) > d + eps) return false;
  }
  return true;
}

std::pair<double, double> r_prime(const FieldEvaluator& f, const std::vector<double>& x,
                                  int d, double eps, double r, double smax,
                                  double rel_tol) {
  double target = d - eps;
  if (f.frequency(x, smax) < target) return {smax, std::max(smax, r)};
  if (f.frequency_limit_zero(x) >= target) return {0.0, r};
  double hi = smax, lo = smax;
  while (f.frequency(x, lo) >= target) {
    hi = lo;
    lo /= 2;
    if (lo < 1e-14) return {0.0, r};
  }
  while ((hi - lo) > rel_tol * hi) {
    double mid = 0.5 * (hi + lo);
    (f.frequency(x, mid) < target ? lo : hi) = mid;
  }
  return {lo, std::max(lo, r)};
}

std::vector<size_t> vitali(const std::vector<Ball>& balls) {
  std::vector<size_t> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    return balls[a].center < balls[b].center;
  });
  std::vector<size_t> kept;
  for (size_t i : order) {
    bool disjoint = true;
    for (size_t k : kept) {
      if (dist(balls[i].center, balls[k].center) <= balls[i].radius + balls[k].radius) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) kept.push_back(i);
  }
  return kept;
}

GoodBadPartition partition_good_bad(const std::vector<std::vector<double>>& points,
                                    const std::vector<double>& r_x, double dilation,
                                    double good_ratio) {
  GoodBadPartition part;
  for (size_t i = 0; i < points.size(); ++i) {
    bool good = true;
    for (size_t j = 0; j < points.size(); ++j) {
      if (dist(points[i], points[j]) <= dilation * r_x[i] &&
          r_x[j] < r_x[i] / good_ratio) {
        good = false;
        break;
      }
    }
    (good ? part.good : part.bad).push_back(i);
  }
  return part;
}

std::vector<ScaleBall> cover_good_scale(const FieldEvaluator& f, const ScaleBall& ball,
                                        int d, double r, double eps, const Config& cfg) {
  CandidateSet cand = build_candidates(f, ball.center, ball.radius, r, cfg);
  std::vector<size_t> all(cand.points.size());
  std::iota(all.begin(), all.end(), 0);
  StepDiagnostics diag;
  return cover_step(f, cand, all, ball, ball.radius, d, r, eps, cfg, &diag);
}

CoverReport recursive_cover(const FieldEvaluator& f, double lambda, double r,
                            const std::vector<double>& center, double radius,
                            const Config& cfg) {
  CoverReport rep;
  rep.center = center;
  rep.radius = radius;
  rep.r = r;
  rep.lambda = lambda;
  const int n = f.dim();
  const double eps = cfg.cover_eps;

  CandidateSet cand = build_candidates(f, center, radius, r, cfg);
  rep.candidate_count = cand.points.size();

  int dstar = std::max(1, static_cast<int>(std::ceil(cfg.cover_degree_factor * lambda)));
  rep.initial_degree = dstar;

  // initial certified scale: shrink until every sampled point is below
  // d* + eps at that scale
  double t0 = radius;
  auto level_ok = [&](double t) {
    for (size_t i = 0; i < cand.points.size(); ++i) {
      if (cand.freq(i, t) > dstar + eps) return false;
    }
    return true;
  };
  while (t0 > r && !level_ok(t0)) t0 /= 2;
  rep.initial_scale = t0;

  StepDiagnostics diag;
  ScaleBall root;
  root.center = center;
  root.radius = radius;
  root.degree = dstar;
  root.status = BallStatus::GoodScale;
  root.scale = t0;

  struct Work {
    ScaleBall ball;
    double region;
  };
  std::vector<Work> current{{root, radius}};
  int degree = dstar;
  double prev_mass = -1.0;

  auto ball_mass = [&](const ScaleBall& b) {
    return std::pow(b.radius, std::max(0, n - 2));
  };

  while (!current.empty()) {
    if (static_cast<int>(rep.levels.size()) > dstar + 1) {
      throw std::logic_error("recursive_cover: level count exceeded the degree budget");
    }
    CoverLevel level;
    level.degree = degree;
    std::vector<Work> next;

    if (degree <= 1) {
      // final sweep: frequencies in these balls are below 3/2 at small
      // scales; cover remaining samples directly with radius-r balls
      for (const Work& w : current) {
        std::vector<Ball> residual;
        for (size_t i = 0; i < cand.points.size(); ++i) {
          if (dist(cand.points[i], w.ball.center) <= w.region) {
            residual.push_back({cand.points[i], r});
          }
        }
        for (size_t k : vitali(residual)) {
          ScaleBall b;
          b.center = residual[k].center;
          b.radius = r;
          b.degree = 1;
          b.status = BallStatus::TerminalR;
          b.scale = r;
          level.balls.push_back(b);
        }
      }
      current.clear();
    } else {
      for (const Work& w : current) {
        std::vector<size_t> in_ball;
        for (size_t i = 0; i < cand.points.size(); ++i) {
          if (dist(cand.points[i], w.ball.center) <= w.region) in_ball.push_back(i);
        }
        auto balls = cover_step(f, cand, in_ball, w.ball, w.region, degree, r, eps, cfg,
                                &diag);
        for (auto& b : balls) level.balls.push_back(std::move(b));
      }
      for (const ScaleBall& b : level.balls) {
        if (b.status != BallStatus::TerminalR && b.status != BallStatus::Excluded) {
          next.push_back({b, cfg.vitali_dilation * b.radius});
        }
      }
      current = std::move(next);
    }

    for (const ScaleBall& b : level.balls) {
      level.mass += ball_mass(b);
      if (b.status == BallStatus::TerminalR) {
        rep.terminal.push_back(b);
        rep.terminal_mass += ball_mass(b);
      }
    }
    if (prev_mass > 0 && level.mass > 0) {
      rep.max_mass_ratio = std::max(rep.max_mass_ratio, level.mass / prev_mass);
    }
    prev_mass = level.mass;
    rep.levels.push_back(std::move(level));
    if (rep.levels.back().balls.empty()) break;
    --degree;
  }

  rep.terminal_count = rep.terminal.size();
  rep.alignment_failures = diag.alignment_failures;
  rep.excluded_certificates = diag.excluded_certificates;
  rep.required_shrink =
      std::isfinite(diag.required_shrink) ? diag.required_shrink : 0.0;

  // soundness scan: every sampled point of S_r must lie in a terminal
  // dilation
  for (size_t i = 0; i < cand.points.size(); ++i) {
    bool covered = false;
    for (const ScaleBall& b : rep.terminal) {
      if (dist(cand.points[i], b.center) <= cfg.vitali_dilation * b.radius) {
        covered = true;
        break;
      }
    }
    if (!covered) ++rep.escapes;
  }
  return rep;
}

}  // namespace almgren
