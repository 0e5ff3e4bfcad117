#include "almgren/elliptic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "almgren/hhp.hpp"

namespace almgren {

namespace {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-15) break;
    }
    double p0 = 1, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1);
    x[i] = 0.5 * (1 - t);  // map [-1,1] -> [0,1], reversed order is fine
    w[i] = 1.0 / ((1 - t * t) * dp * dp);
  }
}

double cubic_weight(double t, int k) {
  // Catmull-Rom basis for samples at -1, 0, 1, 2
  switch (k) {
    case 0: return 0.5 * (-t * t * t + 2 * t * t - t);
    case 1: return 0.5 * (3 * t * t * t - 5 * t * t + 2);
    case 2: return 0.5 * (-3 * t * t * t + 4 * t * t + t);
    default: return 0.5 * (t * t * t - t * t);
  }
}

double cubic_weight_deriv(double t, int k) {
  switch (k) {
    case 0: return 0.5 * (-3 * t * t + 4 * t - 1);
    case 1: return 0.5 * (9 * t * t - 10 * t);
    case 2: return 0.5 * (-9 * t * t + 8 * t + 1);
    default: return 0.5 * (3 * t * t - 2 * t);
  }
}

}  // namespace

CoefficientField CoefficientField::identity() {
  CoefficientField c;
  c.a = [](double, double) { return std::array<double, 3>{1.0, 0.0, 1.0}; };
  c.b = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  c.c = [](double, double) { return 0.0; };
  c.lambda = 0.0;
  return c;
}

CoefficientField CoefficientField::diag_linear(double mu) {
  CoefficientField c;
  c.a = [mu](double x, double) { return std::array<double, 3>{1.0 + mu * x, 0.0, 1.0}; };
  c.b = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  c.c = [](double, double) { return 0.0; };
  c.lambda = 2 * mu;
  return c;
}

CoefficientField CoefficientField::sheared(double mu) {
  CoefficientField c;
  c.a = [mu](double x, double y) {
    return std::array<double, 3>{1.0 + mu * y, mu * 0.5 * x, 1.0 - mu * 0.5 * y};
  };
  c.b = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  c.c = [](double, double) { return 0.0; };
  c.lambda = 3 * mu;
  return c;
}

CoefficientField CoefficientField::lower_order(double mu) {
  CoefficientField c = identity();
  c.b = [mu](double, double) { return std::array<double, 2>{mu, 0.0}; };
  c.c = [mu](double, double) { return -mu; };
  c.lambda = mu;
  return c;
}

CoefficientField CoefficientField::preset(const std::string& name, double mu) {
  if (name == "identity") return identity();
  if (name == "diag_linear") return diag_linear(mu);
  if (name == "sheared") return sheared(mu);
  if (name == "lower_order") return lower_order(mu);
  throw std::invalid_argument("unknown coefficient preset: " + name);
}

bool CoefficientField::check_invariants(double half_extent, int probes) const {
  double h = 2 * half_extent / (probes - 1);
  for (int iy = 0; iy < probes; ++iy) {
    for (int ix = 0; ix < probes; ++ix) {
      double x = -half_extent + ix * h, y = -half_extent + iy * h;
      auto [a11, a12, a22] = a(x, y);
      double tr = a11 + a22, det = a11 * a22 - a12 * a12;
      double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
      double lo = tr / 2 - disc, hi = tr / 2 + disc;
      if (lo < 1.0 / (1 + lambda) - 1e-12 || hi > (1 + lambda) + 1e-12) return false;
      auto [b1, b2] = b(x, y);
      if (std::hypot(b1, b2) > lambda + 1e-12) return false;
      if (std::fabs(c(x, y)) > lambda + 1e-12) return false;
      // Lipschitz probe against the right neighbor
      if (ix + 1 < probes) {
        auto an = a(x + h, y);
        for (int t = 0; t < 3; ++t) {
          if (std::fabs(an[t] - a(x, y)[t]) > lambda * h * (1 + 1e-9) + 1e-12) return false;
        }
      }
    }
  }
  return true;
}

double GridField::interp(double x, double y) const {
  double h = spacing();
  double fx = (x + half_extent) / h, fy = (y + half_extent) / h;
  int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
  ix = std::max(1, std::min(nodes - 3, ix));
  iy = std::max(1, std::min(nodes - 3, iy));
  double tx = fx - ix, ty = fy - iy;
  double s = 0;
  for (int j = 0; j < 4; ++j) {
    double wy = cubic_weight(ty, j);
    for (int i = 0; i < 4; ++i) {
      s += wy * cubic_weight(tx, i) * at(ix + i - 1, iy + j - 1);
    }
  }
  return s;
}

std::array<double, 2> GridField::interp_grad(double x, double y) const {
  double h = spacing();
  double fx = (x + half_extent) / h, fy = (y + half_extent) / h;
  int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
  ix = std::max(1, std::min(nodes - 3, ix));
  iy = std::max(1, std::min(nodes - 3, iy));
  double tx = fx - ix, ty = fy - iy;
  double gx = 0, gy = 0;
  for (int j = 0; j < 4; ++j) {
    double wy = cubic_weight(ty, j), dwy = cubic_weight_deriv(ty, j);
    for (int i = 0; i < 4; ++i) {
      double v = at(ix + i - 1, iy + j - 1);
      gx += wy * cubic_weight_deriv(tx, i) * v;
      gy += dwy * cubic_weight(tx, i) * v;
    }
  }
  return {gx / h, gy / h};
}

GridField solve(const CoefficientField& coeffs,
                const std::function<double(double, double)>& boundary, int nodes,
                double half_extent, double* residual_out) {
  GridField g;
  g.nodes = nodes;
  g.half_extent = half_extent;
  g.values.assign(static_cast<size_t>(nodes) * nodes, 0.0);
  const double h = g.spacing();
  const int m = nodes - 2;  // interior nodes per side
  auto interior_index = [&](int ix, int iy) { return (iy - 1) * m + (ix - 1); };

  for (int i = 0; i < nodes; ++i) {
    g.at(i, 0) = boundary(g.coord(i), g.coord(0));
    g.at(i, nodes - 1) = boundary(g.coord(i), g.coord(nodes - 1));
    g.at(0, i) = boundary(g.coord(0), g.coord(i));
    g.at(nodes - 1, i) = boundary(g.coord(nodes - 1), g.coord(i));
  }

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<long>(m) * m);
  auto add = [&](int row, int ix, int iy, double v) {
    if (ix == 0 || iy == 0 || ix == nodes - 1 || iy == nodes - 1) {
      rhs(row) -= v * g.at(ix, iy);
    } else {
      trip.emplace_back(row, interior_index(ix, iy), v);
    }
  };

  for (int iy = 1; iy < nodes - 1; ++iy) {
    for (int ix = 1; ix < nodes - 1; ++ix) {
      const double x = g.coord(ix), y = g.coord(iy);
      const int row = interior_index(ix, iy);
      const double a11e = coeffs.a(x + h / 2, y)[0], a11w = coeffs.a(x - h / 2, y)[0];
      const double a22n = coeffs.a(x, y + h / 2)[2], a22s = coeffs.a(x, y - h / 2)[2];
      // flux form diagonal part
      add(row, ix + 1, iy, a11e / (h * h));
      add(row, ix - 1, iy, a11w / (h * h));
      add(row, ix, iy + 1, a22n / (h * h));
      add(row, ix, iy - 1, a22s / (h * h));
      add(row, ix, iy, -(a11e + a11w + a22n + a22s) / (h * h));
      // mixed terms d_x(a12 u_y) + d_y(a12 u_x)
      const double a12e = coeffs.a(x + h, y)[1], a12w = coeffs.a(x - h, y)[1];
      const double a12n = coeffs.a(x, y + h)[1], a12s = coeffs.a(x, y - h)[1];
      add(row, ix + 1, iy + 1, (a12e + a12n) / (4 * h * h));
      add(row, ix + 1, iy - 1, -(a12e + a12s) / (4 * h * h));
      add(row, ix - 1, iy + 1, -(a12w + a12n) / (4 * h * h));
      add(row, ix - 1, iy - 1, (a12w + a12s) / (4 * h * h));
      // lower order terms
      auto [b1, b2] = coeffs.b(x, y);
      add(row, ix + 1, iy, b1 / (2 * h));
      add(row, ix - 1, iy, -b1 / (2 * h));
      add(row, ix, iy + 1, b2 / (2 * h));
      add(row, ix, iy - 1, -b2 / (2 * h));
      add(row, ix, iy, coeffs.c(x, y));
    }
  }

  Eigen::SparseMatrix<double> A(static_cast<long>(m) * m, static_cast<long>(m) * m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve: factorization failed");
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve: singular system");

  for (int iy = 1; iy < nodes - 1; ++iy) {
    for (int ix = 1; ix < nodes - 1; ++ix) {
      g.at(ix, iy) = sol(interior_index(ix, iy));
    }
  }
  if (residual_out) {
    Eigen::VectorXd res = A * sol - rhs;
    *residual_out = res.lpNorm<Eigen::Infinity>() / std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  }
  return g;
}

AnisotropicMetric AnisotropicMetric::at(const CoefficientField& coeffs,
                                        std::array<double, 2> xbar) {
  AnisotropicMetric m;
  m.xbar = xbar;
  auto [a11, a12, a22] = coeffs.a(xbar[0], xbar[1]);
  m.A = {a11, a12, a22};
  double det = a11 * a22 - a12 * a12;
  m.Ainv = {a22 / det, -a12 / det, a11 / det};
  // closed-form SPD square root of a 2x2 matrix
  double s = std::sqrt(det);
  double t = std::sqrt(a11 + a22 + 2 * s);
  m.sqrtA = {(a11 + s) / t, a12 / t, a12 / t, (a22 + s) / t};
  return m;
}

std::array<double, 2> AnisotropicMetric::ellipsoid_point(double r, double phi) const {
  double cx = r * std::cos(phi), cy = r * std::sin(phi);
  return {xbar[0] + sqrtA[0] * cx + sqrtA[1] * cy, xbar[1] + sqrtA[2] * cx + sqrtA[3] * cy};
}

double AnisotropicMetric::eta(double x, double y, const CoefficientField& coeffs) const {
  double dx = x - xbar[0], dy = y - xbar[1];
  double r2 = Ainv[0] * dx * dx + 2 * Ainv[1] * dx * dy + Ainv[2] * dy * dy;
  if (r2 <= 0) return 1.0;
  // grad r = Ainv (x - xbar) / r
  double gx = (Ainv[0] * dx + Ainv[1] * dy), gy = (Ainv[1] * dx + Ainv[2] * dy);
  auto [a11, a12, a22] = coeffs.a(x, y);
  return (a11 * gx * gx + 2 * a12 * gx * gy + a22 * gy * gy) / r2;
}

GeneralizedFrequency generalized_frequency(const GridField& u, const CoefficientField& coeffs,
                                           std::array<double, 2> xbar, double r,
                                           int quad_nodes) {
  AnisotropicMetric m = AnisotropicMetric::at(coeffs, xbar);
  const double u0 = u.interp(xbar[0], xbar[1]);
  const double detA = m.A[0] * m.A[2] - m.A[1] * m.A[1];
  const double det_sqrtA = std::sqrt(detA);

  // boundary: H = int (u - u0)^2 dS_g over the geodesic sphere
  const int M = quad_nodes;
  double H = 0;
  for (int k = 0; k < M; ++k) {
    double phi = 2 * M_PI * (k + 0.5) / M;
    auto p = m.ellipsoid_point(r, phi);
    // tangent vector dx/dphi
    double tx = r * (-std::sin(phi)), ty = r * std::cos(phi);
    double vx = m.sqrtA[0] * tx + m.sqrtA[1] * ty;
    double vy = m.sqrtA[2] * tx + m.sqrtA[3] * ty;
    auto [a11, a12, a22] = coeffs.a(p[0], p[1]);
    double det = a11 * a22 - a12 * a12;
    // a_ij = inverse of a^{ij}
    double i11 = a22 / det, i12 = -a12 / det, i22 = a11 / det;
    double quad = i11 * vx * vx + 2 * i12 * vx * vy + i22 * vy * vy;
    double eta = m.eta(p[0], p[1], coeffs);
    double du = u.interp(p[0], p[1]) - u0;
    H += du * du * std::sqrt(std::max(0.0, eta * quad)) * (2 * M_PI / M);
  }

  // interior: Gauss-Legendre in the radial coordinate, trapezoid in angle
  std::vector<double> gx, gw;
  gauss_legendre(48, gx, gw);
  const int Mphi = std::max(128, quad_nodes / 4);
  const double eps_det = 1e-7;
  double D = 0, Icorr = 0;
  for (size_t iq = 0; iq < gx.size(); ++iq) {
    double s = r * gx[iq];
    double ws = r * gw[iq];
    for (int k = 0; k < Mphi; ++k) {
      double phi = 2 * M_PI * (k + 0.5) / Mphi;
      auto p = m.ellipsoid_point(s, phi);
      auto [a11, a12, a22] = coeffs.a(p[0], p[1]);
      double det = a11 * a22 - a12 * a12;
      auto grad = u.interp_grad(p[0], p[1]);
      double Agrad_x = a11 * grad[0] + a12 * grad[1];
      double Agrad_y = a12 * grad[0] + a22 * grad[1];
      double energy = grad[0] * Agrad_x + grad[1] * Agrad_y;
      // dV = det(sqrtA(xbar)) s ds dphi; the eta factors cancel in n = 2
      double wvol = det_sqrtA * s * ws * (2 * M_PI / Mphi);
      D += energy / std::sqrt(det) * wvol;
      // (u - u0) Delta_g u dV_g with
      // Delta_g u = (1/eta) [div(a grad u) - (1/2) (a grad u) . grad ln det a]
      // and div(a grad u) = -b . grad u - c u from the equation; the
      // 1/eta cancels against dV_g just like in the Dirichlet term.
      auto [b1, b2] = coeffs.b(p[0], p[1]);
      double divterm = -(b1 * grad[0] + b2 * grad[1]) - coeffs.c(p[0], p[1]) * u.interp(p[0], p[1]);
      auto ldet = [&](double xx, double yy) {
        auto [q11, q12, q22] = coeffs.a(xx, yy);
        return std::log(q11 * q22 - q12 * q12);
      };
      double dldx = (ldet(p[0] + eps_det, p[1]) - ldet(p[0] - eps_det, p[1])) / (2 * eps_det);
      double dldy = (ldet(p[0], p[1] + eps_det) - ldet(p[0], p[1] - eps_det)) / (2 * eps_det);
      double lap = divterm - 0.5 * (Agrad_x * dldx + Agrad_y * dldy);
      double du = u.interp(p[0], p[1]) - u0;
      Icorr += du * lap / std::sqrt(det) * wvol;
    }
  }

  GeneralizedFrequency out;
  out.D = D;
  out.I = D + Icorr;
  out.H = H;
  if (H <= 0) throw std::runtime_error("generalized_frequency: zero boundary height");
  out.N = r * out.I / H;
  out.discrepancy = std::fabs(out.I - out.D) / std::max(1e-300, out.D);
  return out;
}

MonotonicityReport almost_monotonicity_check(const GridField& u,
                                             const CoefficientField& coeffs,
                                             std::array<double, 2> xbar,
                                             const std::vector<double>& radii,
                                             int quad_nodes) {
  MonotonicityReport rep;
  rep.radii = radii;
  for (double r : radii) {
    rep.N.push_back(generalized_frequency(u, coeffs, xbar, r, quad_nodes).N);
  }
  double C = 0;
  for (size_t i = 0; i + 1 < radii.size(); ++i) {
    if (rep.N[i + 1] < rep.N[i] && rep.N[i + 1] > 0) {
      C = std::max(C, std::log(rep.N[i] / rep.N[i + 1]) / (radii[i + 1] - radii[i]));
    }
  }
  rep.C = C;
  return rep;
}

GridField tangent_grid(const GridField& u, const CoefficientField& coeffs,
                       std::array<double, 2> xbar, double r1, int nodes) {
  AnisotropicMetric m = AnisotropicMetric::at(coeffs, xbar);
  const double u0 = u.interp(xbar[0], xbar[1]);
  // plain circle average in blow-up coordinates (the tangent map definition)
  const int M = 1024;
  double H = 0;
  for (int k = 0; k < M; ++k) {
    double phi = 2 * M_PI * (k + 0.5) / M;
    auto p = m.ellipsoid_point(r1, phi);
    double du = u.interp(p[0], p[1]) - u0;
    H += du * du / M;
  }
  if (H <= 0) throw std::runtime_error("tangent_grid: constant on the blow-up sphere");
  double norm = std::sqrt(H);
  GridField T;
  T.nodes = nodes;
  T.half_extent = 1.0;
  T.values.assign(static_cast<size_t>(nodes) * nodes, 0.0);
  for (int iy = 0; iy < nodes; ++iy) {
    for (int ix = 0; ix < nodes; ++ix) {
      double yx = T.coord(ix), yy = T.coord(iy);
      double px = xbar[0] + r1 * (m.sqrtA[0] * yx + m.sqrtA[1] * yy);
      double py = xbar[1] + r1 * (m.sqrtA[2] * yx + m.sqrtA[3] * yy);
      T.at(ix, iy) = (u.interp(px, py) - u0) / norm;
    }
  }
  return T;
}

HarmonicApproximation harmonic_approximation(const GridField& T, int N_deg,
                                             double r2_over_r1) {
  if (N_deg < 0 || N_deg > 16) {
    throw std::invalid_argument("harmonic_approximation: correction degree out of range");
  }
  const int n = T.nodes;
  const double h = T.spacing();
  // f = Delta T by 5-point differences on the unit disk
  std::vector<double> f(static_cast<size_t>(n) * n, 0.0);
  double lapT_max = 0;
  for (int iy = 1; iy < n - 1; ++iy) {
    for (int ix = 1; ix < n - 1; ++ix) {
      double x = T.coord(ix), y = T.coord(iy);
      if (x * x + y * y > 1.0) continue;
      double lap = (T.at(ix + 1, iy) + T.at(ix - 1, iy) + T.at(ix, iy + 1) +
                    T.at(ix, iy - 1) - 4 * T.at(ix, iy)) /
                   (h * h);
      f[static_cast<size_t>(iy) * n + ix] = lap;
      if (x * x + y * y <= 0.25) lapT_max = std::max(lapT_max, std::fabs(lap));
    }
  }

  // log-kernel expansion coefficients over the annulus r2/r1 <= |y| <= 1:
  // degree-k harmonic part of G(. - y) is
  //   -(1/(2 pi k)) |y|^{-k} [cos(k t_y) Re_k + sin(k t_y) Im_k]
  std::vector<double> cA(N_deg + 1, 0.0), cB(N_deg + 1, 0.0);
  const double inner_r = std::max(0.0, r2_over_r1);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      double fv = f[static_cast<size_t>(iy) * n + ix];
      if (fv == 0) continue;
      double x = T.coord(ix), y = T.coord(iy);
      double rho = std::hypot(x, y);
      if (rho < inner_r || rho > 1.0 || rho < 1e-12) continue;
      double th = std::atan2(y, x);
      for (int k = 1; k <= N_deg; ++k) {
        double w = -std::pow(rho, -k) / (2 * M_PI * k) * fv * h * h;
        cA[k] += w * std::cos(k * th);
        cB[k] += w * std::sin(k * th);
      }
    }
  }

  // w(x) = int (G(x-y) - G(-y)) f dy  -  sum_k [cA_k Re_k + cB_k Im_k](x)
  // singular cell: exact integral of ln|.| over the centered square
  const double a = h / 2;
  const double selfint = (2 * a * a * std::log(2 * a * a) - 6 * a * a + M_PI * a * a) / (2 * M_PI);

  GridField w;
  w.nodes = n;
  w.half_extent = T.half_extent;
  w.values.assign(static_cast<size_t>(n) * n, 0.0);

  std::vector<std::pair<int, int>> sources;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      if (f[static_cast<size_t>(iy) * n + ix] != 0) sources.emplace_back(ix, iy);
    }
  }

  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      double x = T.coord(ix), y = T.coord(iy);
      if (x * x + y * y > 1.0) continue;
      double acc = 0;
      for (const auto& [sx, sy] : sources) {
        double fv = f[static_cast<size_t>(sy) * n + sx];
        double yx = T.coord(sx), yy = T.coord(sy);
        double d2 = (x - yx) * (x - yx) + (y - yy) * (y - yy);
        double ry2 = yx * yx + yy * yy;
        double gxy;
        if (d2 < 0.25 * h * h) {
          gxy = selfint / (h * h);  // averaged over the singular cell
        } else {
          gxy = std::log(d2) / (4 * M_PI);
        }
        double g0y = ry2 > 1e-24 ? std::log(ry2) / (4 * M_PI) : gxy;
        acc += (gxy - g0y) * fv * h * h;
      }
      // harmonic correction via complex powers
      std::complex<double> z(x, y), zk(1, 0);
      double corr = 0;
      for (int k = 1; k <= N_deg; ++k) {
        zk *= z;
        corr += cA[k] * zk.real() + cB[k] * zk.imag();
      }
      w.at(ix, iy) = acc - corr;
    }
  }

  HarmonicApproximation out;
  out.degree = N_deg;
  out.w_at_zero = w.interp(0.0, 0.0);
  out.lap_T_max = lapT_max;
  out.w = w;
  out.h = T;
  for (size_t i = 0; i < out.h.values.size(); ++i) out.h.values[i] -= w.values[i];
  double laph = 0;
  for (int iy = 1; iy < n - 1; ++iy) {
    for (int ix = 1; ix < n - 1; ++ix) {
      double x = T.coord(ix), y = T.coord(iy);
      if (x * x + y * y > 0.2) continue;
      double lap = (out.h.at(ix + 1, iy) + out.h.at(ix - 1, iy) + out.h.at(ix, iy + 1) +
                    out.h.at(ix, iy - 1) - 4 * out.h.at(ix, iy)) /
                   (h * h);
      laph = std::max(laph, std::fabs(lap));
    }
  }
  out.lap_h_max = laph;
  return out;
}

GradientBoundReport gradient_lower_bound_check(const GridField& T, std::array<double, 2> x,
                                               double r, double delta) {
  GridFieldEvaluator ev(T, T.half_extent);
  GradientBoundReport rep;
  rep.freq = ev.frequency({x[0], x[1]}, r);
  if (rep.freq > 1.5) {
    throw std::invalid_argument("gradient_lower_bound_check: N(x, r) > 3/2");
  }
  auto g = T.interp_grad(x[0], x[1]);
  // normalize as the tangent map at (x, r): unit boundary height
  double hsq = ev.boundary_height({x[0], x[1]}, r);
  rep.grad_sq = (g[0] * g[0] + g[1] * g[1]) * r * r / hsq;
  rep.bound = 0.5 * 2 * (1 + delta);  // n/2 (1 + delta), n = 2
  rep.slack = rep.grad_sq - rep.bound;
  return rep;
}

Expansion expansion_from_grid(const GridField& g, int max_degree, double tol,
                              double* residual_out) {
  const double rho = 0.5;
  const int M = 1024;
  std::vector<double> vals(M);
  double scale = 0;
  for (int k = 0; k < M; ++k) {
    double phi = 2 * M_PI * (k + 0.5) / M;
    vals[k] = g.interp(rho * std::cos(phi), rho * std::sin(phi));
    scale = std::max(scale, std::fabs(vals[k]));
  }
  Expansion e(2);
  double mean = 0;
  for (double v : vals) mean += v / M;
  if (std::fabs(mean) > 1e-14 * std::max(1.0, scale)) {
    e.add_term(0, ExactPoly::constant(2, Rational(1)), rational_from_double(mean));
  }
  for (int k = 1; k <= max_degree; ++k) {
    double A = 0, B = 0;
    for (int m2 = 0; m2 < M; ++m2) {
      double phi = 2 * M_PI * (m2 + 0.5) / M;
      A += 2.0 / M * vals[m2] * std::cos(k * phi);
      B += 2.0 / M * vals[m2] * std::sin(k * phi);
    }
    // component (A cos k t + B sin k t) (r/rho)^k
    HhpBasis b2 = basis_2d(k);
    ExactPoly comp = b2.elements[1] * (rational_from_double(A) / 2) +
                     b2.elements[0] * (rational_from_double(B) / 2);
    if (comp.is_zero()) continue;
    Rational amp = comp.coeff(*comp.leading_monomial());
    if (std::fabs(to_double(amp)) * std::pow(2.0, k) < 1e-13 * std::max(1.0, scale)) {
      continue;  // noise-level mode
    }
    e.add_term(k, comp, pow_rational(Rational(2), static_cast<unsigned>(k)));
  }
  // reconstruction check on B(0, 1/4)
  double resid = 0;
  const int probes = 24;
  for (int i = 0; i < probes; ++i) {
    double rr = 0.25 * (i + 1.0) / probes;
    for (int k = 0; k < 16; ++k) {
      double phi = 2 * M_PI * (k + 0.5) / 16;
      std::vector<double> p{rr * std::cos(phi), rr * std::sin(phi)};
      resid = std::max(resid, std::fabs(e.eval_local(p) - g.interp(p[0], p[1])));
    }
  }
  resid /= std::max(1e-300, scale);
  if (residual_out) *residual_out = resid;
  if (resid > tol) {
    throw std::runtime_error("expansion_from_grid: projection residual too large");
  }
  return e;
}

GridFieldEvaluator::GridFieldEvaluator(GridField g, double domain_radius)
    : grid_(std::move(g)), domain_radius_(domain_radius) {}

double GridFieldEvaluator::value(const std::vector<double>& x) const {
  return grid_.interp(x[0], x[1]);
}

std::vector<double> GridFieldEvaluator::gradient(const std::vector<double>& x) const {
  auto g = grid_.interp_grad(x[0], x[1]);
  return {g[0], g[1]};
}

double GridFieldEvaluator::boundary_height(const std::vector<double>& x, double r) const {
  const int M = 256;
  double u0 = grid_.interp(x[0], x[1]);
  double s = 0;
  for (int k = 0; k < M; ++k) {
    double phi = 2 * M_PI * (k + 0.5) / M;
    double du = grid_.interp(x[0] + r * std::cos(phi), x[1] + r * std::sin(phi)) - u0;
    s += du * du / M;
  }
  return s;
}

double GridFieldEvaluator::boundary_mean_sq(const std::vector<double>& x, double r) const {
  const int M = 256;
  double s = 0;
  for (int k = 0; k < M; ++k) {
    double phi = 2 * M_PI * (k + 0.5) / M;
    double u = grid_.interp(x[0] + r * std::cos(phi), x[1] + r * std::sin(phi));
    s += u * u / M;
  }
  return s;
}

double GridFieldEvaluator::frequency(const std::vector<double>& x, double r) const {
  std::vector<double> gx, gw;
  gauss_legendre(32, gx, gw);
  const int M = 128;
  double D = 0;
  for (size_t iq = 0; iq < gx.size(); ++iq) {
    double s = r * gx[iq];
    for (int k = 0; k < M; ++k) {
      double phi = 2 * M_PI * (k + 0.5) / M;
      auto g = grid_.interp_grad(x[0] + s * std::cos(phi), x[1] + s * std::sin(phi));
      D += (g[0] * g[0] + g[1] * g[1]) * s * (r * gw[iq]) * (2 * M_PI / M);
    }
  }
  double H = boundary_height(x, r) * 2 * M_PI * r;
  if (H <= 0) return 0;
  return r * D / H;
}

double GridFieldEvaluator::frequency_limit_zero(const std::vector<double>& x) const {
  return frequency(x, 8 * grid_.spacing());
}

}  // namespace almgren
