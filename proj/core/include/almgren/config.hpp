#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace almgren {

/// All tunable constants in one place. Values are the defaults used by the
/// acceptance runs; every override is recorded in output metadata through
/// config_hash().
struct Config {
  // hhp: almost invariant subspace detection
  double eps0_invariant = 1e-4;
  double tau = 1e-2;
  int sphere_samples_per_dim = 10000;  // containment checks use >= this * n

  // frequency: pinch machinery
  double eps0_pinch = 1e-3;

  // geometry: effective sets
  double eps_nodal = 1.0 / 16.0;
  double eps_singular = 1.0 / 16.0;
  int ball_inf_samples_per_dim = 200;  // inf over B_r(x) uses >= this * n
  double bisect_rel_tol = 1e-4;
  int d_critical_samples = 64;

  // covering
  double cover_eps = 1e-2;
  double cover_degree_factor = 2.0;  // initial degree = ceil(factor * Lambda)
  double cover_tau = 1e-2;           // graph-alignment tolerance
  double vitali_dilation = 5.0;
  double good_ratio = 7.0;     // S_g: r_y >= r_x / 7 inside B(x, 5 r_x)
  double bad_margin = 55.0;    // t_y = min_i d(y, x_i) / 55
  double shrink_tau = 1e-2;    // exclusion certificates use (shrink_tau)^d
  int good_scale_samples_base = 20;  // good-scale checks sample ~ base^n points
  int good_scale_samples_cap = 4000;

  // elliptic (n = 2)
  int grid_nodes = 129;  // nodes per side of the FD grid
  int boundary_quad_nodes = 512;
  double solver_residual_tol = 1e-10;
  std::vector<double> lambda_presets{0.0, 0.05, 0.1, 0.2};

  // cli / execution
  uint64_t seed = 42;
  double decay_rho = 0.7;  // random expansion coefficient decay
  int jobs = 0;            // 0 = hardware concurrency

  std::string to_json() const;
  static Config from_json(const std::string& text);
  /// FNV-1a hash of the canonical serialization; embedded in outputs.
  uint64_t hash() const;
};

/// Deterministic parallel map: results must be written into index-addressed
/// slots by the callback, so the thread count never changes bytes.
void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn);

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace almgren
