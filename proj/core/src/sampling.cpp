#include "almgren/sampling.hpp"

#include <cmath>

namespace almgren {

double halton(uint64_t index, uint32_t base) {
  double f = 1.0, r = 0.0;
  uint64_t i = index + 1;  // skip the degenerate 0 term
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

namespace {

constexpr uint32_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

// inverse of the standard normal CDF (Acklam's rational approximation);
// plenty for quasi-random direction generation
double norm_inv(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

std::vector<std::vector<double>> sphere_points(int n, int count) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 2.0 * M_PI * (i + 0.5) / count;
      pts.push_back({std::cos(t), std::sin(t)});
    }
    return pts;
  }
  if (n == 3) {
    // Fibonacci lattice
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / count;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double t = ga * i;
      pts.push_back({rho * std::cos(t), rho * std::sin(t), z});
    }
    return pts;
  }
  for (int i = 0; i < count; ++i) {
    std::vector<double> v(n);
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      double u = halton(static_cast<uint64_t>(i), kPrimes[j]);
      u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
      v[j] = norm_inv(u);
      s += v[j] * v[j];
    }
    s = std::sqrt(s);
    if (s < 1e-12) s = 1.0;
    for (int j = 0; j < n; ++j) v[j] /= s;
    pts.push_back(std::move(v));
  }
  return pts;
}

std::vector<std::vector<double>> ball_points(int n, int count) {
  auto dirs = sphere_points(n, count);
  std::vector<std::vector<double>> pts;
  pts.reserve(count + 1);
  pts.push_back(std::vector<double>(n, 0.0));
  for (int i = 0; i < count; ++i) {
    // shuffle the radius stream against the direction stream with a
    // golden-ratio rotation so shells do not correlate with longitude
    double u = halton(static_cast<uint64_t>(i), kPrimes[(n + 1) % 10]);
    u = std::fmod(u + 0.61803398874989484820 * i, 1.0);
    double rad = std::pow(u, 1.0 / n);
    auto& d = dirs[i];
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = d[j] * rad;
    pts.push_back(std::move(v));
  }
  return pts;
}

}  // namespace almgren
