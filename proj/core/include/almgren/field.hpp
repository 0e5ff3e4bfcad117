#pragma once

#include <memory>
#include <vector>

#include "almgren/expansion.hpp"

namespace almgren {

/// Callable view of u and grad u at arbitrary points, plus the closed-form
/// or quadrature machinery the geometry layer needs. Implementations must
/// be safe for concurrent read-only use.
class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;

  virtual int dim() const = 0;
  /// Function is defined on B(0, domain_radius()).
  virtual double domain_radius() const = 0;

  virtual double value(const std::vector<double>& x) const = 0;
  virtual std::vector<double> gradient(const std::vector<double>& x) const = 0;
  /// Row-major Hessian; default central differences of the gradient.
  virtual std::vector<double> hessian(const std::vector<double>& x) const;

  /// Normalized Almgren frequency N(x, r).
  virtual double frequency(const std::vector<double>& x, double r) const = 0;
  /// Mean of (u - u(x))^2 over the sphere of radius r about x.
  virtual double boundary_height(const std::vector<double>& x, double r) const = 0;
  /// Mean of u^2 over the sphere of radius r about x.
  virtual double boundary_mean_sq(const std::vector<double>& x, double r) const = 0;
  /// Vanishing order of u - u(x) at x (the limit N(x, 0+)).
  virtual double frequency_limit_zero(const std::vector<double>& x) const = 0;
};

/// Expansion-backed evaluator. Spherical means and frequencies are closed
/// forms in the shifted coefficient masses s_k(x) = a_k(x)^2, which are
/// computed from precomputed derivative polynomials and per-degree monomial
/// Gram matrices; no quadrature is involved.
class ExpansionField : public FieldEvaluator {
 public:
  explicit ExpansionField(Expansion e, double domain_radius = 1.0);
  ~ExpansionField() override;

  int dim() const override;
  double domain_radius() const override;
  double value(const std::vector<double>& x) const override;
  std::vector<double> gradient(const std::vector<double>& x) const override;
  std::vector<double> hessian(const std::vector<double>& x) const override;
  double frequency(const std::vector<double>& x, double r) const override;
  double boundary_height(const std::vector<double>& x, double r) const override;
  double boundary_mean_sq(const std::vector<double>& x, double r) const override;
  double frequency_limit_zero(const std::vector<double>& x) const override;

  const Expansion& expansion() const;

  /// s_k(x) for k = 0..max_degree: the squared coefficient masses of the
  /// expansion re-centered at x. s_0 = (u(x) - 0)^2 ... i.e. u(x)^2.
  std::vector<double> height_coeffs(const std::vector<double>& x) const;

  static double frequency_from_coeffs(const std::vector<double>& s, double r);
  static double height_from_coeffs(const std::vector<double>& s, double r, bool centered);
  static int vanishing_order_from_coeffs(const std::vector<double>& s);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace almgren
