#include "almgren/config.hpp"

#include <atomic>
#include <nlohmann/json.hpp>
#include <thread>

namespace almgren {

using nlohmann::json;

namespace {

json to_json_obj(const Config& c) {
  return json{{"eps0_invariant", c.eps0_invariant},
              {"tau", c.tau},
              {"sphere_samples_per_dim", c.sphere_samples_per_dim},
              {"eps0_pinch", c.eps0_pinch},
              {"eps_nodal", c.eps_nodal},
              {"eps_singular", c.eps_singular},
              {"ball_inf_samples_per_dim", c.ball_inf_samples_per_dim},
              {"bisect_rel_tol", c.bisect_rel_tol},
              {"d_critical_samples", c.d_critical_samples},
              {"cover_eps", c.cover_eps},
              {"cover_degree_factor", c.cover_degree_factor},
              {"cover_tau", c.cover_tau},
              {"vitali_dilation", c.vitali_dilation},
              {"good_ratio", c.good_ratio},
              {"bad_margin", c.bad_margin},
              {"shrink_tau", c.shrink_tau},
              {"good_scale_samples_base", c.good_scale_samples_base},
              {"good_scale_samples_cap", c.good_scale_samples_cap},
              {"grid_nodes", c.grid_nodes},
              {"boundary_quad_nodes", c.boundary_quad_nodes},
              {"solver_residual_tol", c.solver_residual_tol},
              {"lambda_presets", c.lambda_presets},
              {"seed", c.seed},
              {"decay_rho", c.decay_rho},
              {"jobs", c.jobs}};
}

}  // namespace

std::string Config::to_json() const { return to_json_obj(*this).dump(2); }

Config Config::from_json(const std::string& text) {
  Config c;
  json j = json::parse(text);
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("eps0_invariant", c.eps0_invariant);
  get("tau", c.tau);
  get("sphere_samples_per_dim", c.sphere_samples_per_dim);
  get("eps0_pinch", c.eps0_pinch);
  get("eps_nodal", c.eps_nodal);
  get("eps_singular", c.eps_singular);
  get("ball_inf_samples_per_dim", c.ball_inf_samples_per_dim);
  get("bisect_rel_tol", c.bisect_rel_tol);
  get("d_critical_samples", c.d_critical_samples);
  get("cover_eps", c.cover_eps);
  get("cover_degree_factor", c.cover_degree_factor);
  get("cover_tau", c.cover_tau);
  get("vitali_dilation", c.vitali_dilation);
  get("good_ratio", c.good_ratio);
  get("bad_margin", c.bad_margin);
  get("shrink_tau", c.shrink_tau);
  get("good_scale_samples_base", c.good_scale_samples_base);
  get("good_scale_samples_cap", c.good_scale_samples_cap);
  get("grid_nodes", c.grid_nodes);
  get("boundary_quad_nodes", c.boundary_quad_nodes);
  get("solver_residual_tol", c.solver_residual_tol);
  get("lambda_presets", c.lambda_presets);
  get("seed", c.seed);
  get("decay_rho", c.decay_rho);
  get("jobs", c.jobs);
  return c;
}

uint64_t Config::hash() const {
  std::string s = to_json_obj(*this).dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn) {
  int workers = resolve_jobs(jobs);
  if (workers <= 1 || count < 2) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace almgren
