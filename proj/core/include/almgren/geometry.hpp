#pragma once

#include <array>
#include <vector>

#include "almgren/config.hpp"
#include "almgren/field.hpp"

namespace almgren {

/// Uniform cell grid covering [-half_extent, half_extent]^n; cells are
/// centered at origin + (i + 1/2) * spacing per axis.
struct GridSpec {
  double spacing = 0.0;
  double half_extent = 0.5;
};

struct SetMask {
  int n = 0;
  double spacing = 0.0;
  std::vector<double> origin;
  std::vector<int> extents;
  std::vector<uint8_t> members;  // flat, last axis fastest
  double r = 0.0;                // defining radius

  size_t cell_count() const { return members.size(); }
  size_t member_count() const;
  std::vector<double> cell_center(size_t flat) const;
};

enum class EffSetKind {
  Critical,    // inf |grad u|^2 < n/(16 r^2) * avg_{dB_2r} (u - u(x))^2
  Singular,    // inf (u^2 + r^2/n |grad u|^2) < 1/16 * avg_{dB_2r} u^2
  Nodal,       // inf u^2 < eps_n * avg_{dB_2r} u^2
  FrequencyS,  // N(x, r) >= 3/2   (the covering-section S_r)
};

/// Builds the membership mask for the chosen effective set. The infimum
/// over B_r(x) is approximated by quasi-uniform sampling plus one Newton
/// descent step from the best sample (a documented lower-bound heuristic;
/// density knob in Config).
SetMask effective_set(const FieldEvaluator& f, double r, EffSetKind kind,
                      const GridSpec& grid, const Config& cfg);

inline SetMask effective_critical_set(const FieldEvaluator& f, double r,
                                      const GridSpec& grid, const Config& cfg) {
  return effective_set(f, r, EffSetKind::Critical, grid, cfg);
}

SetMask effective_nodal_set(const FieldEvaluator& f, double r, double eps_n,
                            const GridSpec& grid, const Config& cfg);

/// sup{0 <= s <= r0 : N(x, s) < 3/2} by bisection on the monotone radius
/// map; returns r0 when N(x, r0) < 3/2 and 0 when the vanishing order at x
/// is already >= 2.
double critical_radius(const FieldEvaluator& f, const std::vector<double>& x, double r0,
                       double rel_tol = 1e-4);

/// d-critical radius: sup of s <= r0 with N(y, s) < d + eps0 for all y in a
/// quasi-uniform sample of B(x, s).
double d_critical_radius(const FieldEvaluator& f, const std::vector<double>& x, int d,
                         double eps0, double r0, const Config& cfg);

/// Volume of the r-dilation of the member cells: exact Euclidean distance
/// transform on the grid, count of cells within distance r times cell^n.
double minkowski_volume(const SetMask& mask, double r);

struct CriticalPoint2d {
  double x = 0, y = 0;
  int multiplicity = 1;
};

/// All critical points of a planar harmonic expansion inside B(0, radius):
/// roots of the derivative of the holomorphic representative via the
/// companion matrix, Newton-polished, clustered into multiplicities.
std::vector<CriticalPoint2d> critical_points_2d(const Expansion& e, double radius = 0.5);

struct InclusionReport {
  bool holds = true;
  double min_workable_C = 0.0;  // max over members of r_c(x)/r
  size_t members = 0;
};

/// Checks the inclusion {effective critical cells} subset {r_c(x) <= C r}.
InclusionReport frequency_inclusion_check(const FieldEvaluator& f, double r, double C,
                                          const SetMask& mask);

struct NodalReport {
  bool center_bound_checked = false;
  bool center_bound_holds = false;
  Rational u0_sq;          // exact u(0)^2
  Rational half_height;    // exact h(0,1)/2
  bool plane_checked = false;
  bool no_zero_off_plane = false;
  std::vector<double> plane_normal;
  double tau = 0.0;
};

/// Nodal nondegeneracy: if the unnormalized frequency at scale 1 is <= 1/2,
/// asserts u(0)^2 >= h(0,1)/2 exactly; if the frequency is eps-pinched
/// around 1, locates the hyperplane V from the degree-1 term and verifies u
/// has no sign change outside B_tau(V) on a dense sample.
NodalReport nodal_nondegeneracy_check(const Expansion& e, double eps, double tau,
                                      const Config& cfg);

}  // namespace almgren
