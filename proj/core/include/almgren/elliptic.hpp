#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "almgren/expansion.hpp"
#include "almgren/field.hpp"

namespace almgren {

/// Symmetric coefficient field a^{ij}(x) with lower order terms b, c and
/// the ellipticity/Lipschitz budget lambda:
/// (1+lambda)^{-1} I <= a <= (1+lambda) I, Lip(a), |b|, |c| <= lambda.
struct CoefficientField {
  // returns {a11, a12, a22}
  std::function<std::array<double, 3>(double, double)> a;
  std::function<std::array<double, 2>(double, double)> b;
  std::function<double(double, double)> c;
  double lambda = 0.0;

  static CoefficientField identity();
  /// a = diag(1 + mu x, 1), b = c = 0; lambda ~ mu.
  static CoefficientField diag_linear(double mu);
  /// a = I + mu [[sin-free smooth bump]], exercising off-diagonal entries.
  static CoefficientField sheared(double mu);
  /// Adds constant lower-order terms to the identity: b = (mu, 0), c = -mu.
  static CoefficientField lower_order(double mu);
  static CoefficientField preset(const std::string& name, double mu);

  /// Verifies the spectral and Lipschitz budgets on a probe grid.
  bool check_invariants(double half_extent = 1.0, int probes = 33) const;
};

/// Uniform nodal grid over [-half_extent, half_extent]^2.
struct GridField {
  int nodes = 0;
  double half_extent = 1.0;
  std::vector<double> values;  // row-major, values[iy * nodes + ix]

  double spacing() const { return 2 * half_extent / (nodes - 1); }
  double coord(int i) const { return -half_extent + i * spacing(); }
  double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * nodes + ix]; }
  double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * nodes + ix]; }

  /// Catmull-Rom bicubic interpolation (exact on cubics).
  double interp(double x, double y) const;
  std::array<double, 2> interp_grad(double x, double y) const;
};

/// Second-order flux-form finite differences with half-node coefficient
/// averaging, Dirichlet data from `boundary`, direct sparse solve.
/// On return *residual_out holds the max interior residual of the
/// discrete system.
GridField solve(const CoefficientField& coeffs,
                const std::function<double(double, double)>& boundary, int nodes,
                double half_extent = 1.0, double* residual_out = nullptr);

/// Geodesic-ellipsoid data of the metric g_ij = eta * a_ij at a base point.
struct AnisotropicMetric {
  std::array<double, 2> xbar;
  std::array<double, 3> A;      // a^{ij}(xbar)
  std::array<double, 3> Ainv;   // a_ij(xbar)
  std::array<double, 4> sqrtA;  // row-major square root of A; the geodesic
                                // ball of radius r is xbar + sqrtA * B(0,r)
  static AnisotropicMetric at(const CoefficientField& coeffs, std::array<double, 2> xbar);
  std::array<double, 2> ellipsoid_point(double r, double phi) const;
  double eta(double x, double y, const CoefficientField& coeffs) const;
};

struct GeneralizedFrequency {
  double N = 0, I = 0, D = 0, H = 0;
  double discrepancy = 0;  // |I - D| / D
};

/// N = r I / H with I, D, H integrated over the geodesic ellipsoid of
/// g(xbar); boundary by trapezoid (>= quad_nodes nodes), interior by
/// Gauss-Legendre x trapezoid product quadrature. The Laplace-Beltrami
/// term is evaluated through the PDE, not second differences.
GeneralizedFrequency generalized_frequency(const GridField& u, const CoefficientField& coeffs,
                                           std::array<double, 2> xbar, double r,
                                           int quad_nodes = 512);

struct MonotonicityReport {
  double C = 0;  // smallest C >= 0 making e^{Cr} N nondecreasing
  std::vector<double> radii;
  std::vector<double> N;
};

MonotonicityReport almost_monotonicity_check(const GridField& u,
                                             const CoefficientField& coeffs,
                                             std::array<double, 2> xbar,
                                             const std::vector<double>& radii,
                                             int quad_nodes = 512);

/// Blow-up of a solved field: T(y) = (u(xbar + r1 sqrtA y) - u(xbar)) / H^(1/2),
/// sampled on its own [-1,1]^2 grid, unit boundary height at radius 1.
GridField tangent_grid(const GridField& u, const CoefficientField& coeffs,
                       std::array<double, 2> xbar, double r1, int nodes);

struct HarmonicApproximation {
  GridField w;
  GridField h;  // h = T - w, numerically harmonic
  int degree = 0;
  double w_at_zero = 0;
  double lap_T_max = 0;      // max |Delta T| over the working disk
  double lap_h_max = 0;      // max |Delta h| over the working disk
};

/// Newtonian-potential construction of w with Delta w = Delta T on
/// B(0,1/2), w(0) = 0, minus the degree <= N harmonic correction built
/// from annulus integrals of the log-kernel expansion.
HarmonicApproximation harmonic_approximation(const GridField& T, int N_deg,
                                             double r2_over_r1);

struct GradientBoundReport {
  double grad_sq = 0;
  double bound = 0;  // (n/2) (1 + delta)
  double slack = 0;
  double freq = 0;  // measured frequency used for the precondition
};

/// Checks |grad T(x)|^2 against (n/2)(1+delta) under the precondition
/// N(x, r) <= 3/2 (throws when the precondition fails).
GradientBoundReport gradient_lower_bound_check(const GridField& T, std::array<double, 2> x,
                                               double r, double delta);

/// Projects a numerically harmonic grid field onto the 2-D hhP basis by
/// boundary-circle quadrature at radius 1/2; throws when the projection
/// does not reconstruct the field to `tol` (relative, on B(0,1/4)).
Expansion expansion_from_grid(const GridField& h, int max_degree, double tol = 1e-4,
                              double* residual_out = nullptr);

/// Classical-frequency evaluator backed by a grid field (n = 2): spherical
/// means by trapezoid quadrature, Dirichlet integrals by polar product
/// quadrature.
class GridFieldEvaluator : public FieldEvaluator {
 public:
  explicit GridFieldEvaluator(GridField g, double domain_radius);

  int dim() const override { return 2; }
  double domain_radius() const override { return domain_radius_; }
  double value(const std::vector<double>& x) const override;
  std::vector<double> gradient(const std::vector<double>& x) const override;
  double frequency(const std::vector<double>& x, double r) const override;
  double boundary_height(const std::vector<double>& x, double r) const override;
  double boundary_mean_sq(const std::vector<double>& x, double r) const override;
  double frequency_limit_zero(const std::vector<double>& x) const override;

  const GridField& grid() const { return grid_; }

 private:
  GridField grid_;
  double domain_radius_;
};

}  // namespace almgren
