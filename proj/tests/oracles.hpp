// Test-only oracles, deliberately independent of the library's closed-form
// paths: Monte-Carlo sphere quadrature, finite differences, brute-force
// grid scans.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "almgren/poly.hpp"
#include "almgren/sampling.hpp"

namespace oracles {

struct MeanStderr {
  double mean = 0;
  double stderr_ = 0;
};

inline std::vector<double> gaussian_sphere_point(almgren::Rng& rng, int n) {
  std::vector<double> v(n);
  double s = 0;
  for (int i = 0; i < n; i += 2) {
    double u1 = std::max(rng.uniform01(), 1e-16), u2 = rng.uniform01();
    double r = std::sqrt(-2 * std::log(u1));
    v[i] = r * std::cos(2 * M_PI * u2);
    if (i + 1 < n) v[i + 1] = r * std::sin(2 * M_PI * u2);
  }
  for (double t : v) s += t * t;
  s = std::sqrt(s);
  for (double& t : v) t /= s;
  return v;
}

/// Monte-Carlo average of f over the unit sphere in R^n.
inline MeanStderr mc_sphere_average(const std::function<double(const std::vector<double>&)>& f,
                                    int n, int samples, uint64_t seed) {
  almgren::Rng rng(seed);
  double sum = 0, sumsq = 0;
  for (int i = 0; i < samples; ++i) {
    double v = f(gaussian_sphere_point(rng, n));
    sum += v;
    sumsq += v * v;
  }
  MeanStderr out;
  out.mean = sum / samples;
  double var = std::max(0.0, sumsq / samples - out.mean * out.mean);
  out.stderr_ = std::sqrt(var / samples);
  return out;
}

/// Numerical Laplacian by central second differences.
inline double fd_laplacian(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x, double h = 1e-4) {
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double orig = x[i];
    x[i] = orig + h;
    double fp = f(x);
    x[i] = orig - h;
    double fm = f(x);
    x[i] = orig;
    s += (fp + fm - 2 * f(x)) / (h * h);
  }
  return s;
}

/// Brute-force sign-change scan for zeros of a 2-D gradient field on a
/// fine grid: returns cells (centers) where both components change sign.
inline std::vector<std::array<double, 2>> grad_zero_scan(
    const std::function<std::array<double, 2>(double, double)>& grad, double radius,
    int cells) {
  std::vector<std::array<double, 2>> hits;
  double h = 2 * radius / cells;
  for (int iy = 0; iy < cells; ++iy) {
    for (int ix = 0; ix < cells; ++ix) {
      double x0 = -radius + ix * h, y0 = -radius + iy * h;
      double gx[4], gy[4];
      int c = 0;
      for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
          auto g = grad(x0 + dx * h, y0 + dy * h);
          gx[c] = g[0];
          gy[c] = g[1];
          ++c;
        }
      }
      auto changes = [](const double* v) {
        bool pos = false, neg = false;
        for (int i = 0; i < 4; ++i) {
          if (v[i] > 0) pos = true;
          if (v[i] < 0) neg = true;
        }
        return pos && neg;
      };
      bool zero_on_node = false;
      for (int i = 0; i < 4; ++i) {
        if (gx[i] == 0 && gy[i] == 0) zero_on_node = true;
      }
      if ((changes(gx) && changes(gy)) || zero_on_node) {
        hits.push_back({x0 + h / 2, y0 + h / 2});
      }
    }
  }
  return hits;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// R^2 of the least-squares fit y ~ a x + b.
inline double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y,
                            double* slope_out = nullptr, double* icept_out = nullptr) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double b = (sy - a * sx) / n;
  if (slope_out) *slope_out = a;
  if (icept_out) *icept_out = b;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (int i = 0; i < n; ++i) {
    double fit = a * x[i] + b;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace oracles
