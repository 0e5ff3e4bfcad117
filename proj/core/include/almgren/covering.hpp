#pragma once

#include <string>
#include <vector>

#include "almgren/config.hpp"
#include "almgren/field.hpp"

namespace almgren {

enum class BallStatus { GoodScale, TerminalR, BadSet, Excluded };
const char* to_string(BallStatus s);

/// Labeled ball of the covering construction. `radius` is the Vitali
/// (disjointness / mass) radius; every coverage claim uses the 5x dilation.
/// `scale` is the scale at which the degree label has been certified for
/// the ball's sample points.
struct ScaleBall {
  std::vector<double> center;
  double radius = 0.0;
  int degree = 1;
  BallStatus status = BallStatus::GoodScale;
  double scale = 0.0;
};

struct CoverLevel {
  int degree = 0;
  std::vector<ScaleBall> balls;
  double mass = 0.0;  // sum radius^{n-2}
};

struct CoverReport {
  std::vector<double> center;
  double radius = 0.0;
  double r = 0.0;
  double lambda = 0.0;
  int initial_degree = 0;
  double initial_scale = 0.0;
  std::vector<CoverLevel> levels;
  std::vector<ScaleBall> terminal;
  size_t terminal_count = 0;
  double terminal_mass = 0.0;
  size_t candidate_count = 0;  // sampled points of S_r in the input ball
  size_t escapes = 0;          // sampled points missed by all terminal dilations
  double max_mass_ratio = 0.0;
  size_t excluded_certificates = 0;  // cells certified non-critical at shrunken scale
  double required_shrink = 0.0;      // min observed r_c(z)/r_i over certificates
  size_t alignment_failures = 0;     // subfamilies whose centers exceed tau off-plane
};

/// True iff N(y, t) <= d + eps for every y in a quasi-uniform sample of
/// B(x, t) (sample count ~ good_scale_samples_base^n, capped).
bool is_good_scale(const FieldEvaluator& f, const std::vector<double>& x, double t, int d,
                   double eps, const Config& cfg);

/// The scale at which N(x, .) crosses d - eps (the paper's r'_x), capped at
/// smax with the +infinity convention, and r_x = max(r'_x, r).
std::pair<double, double> r_prime(const FieldEvaluator& f, const std::vector<double>& x,
                                  int d, double eps, double r, double smax,
                                  double rel_tol = 1e-4);

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

/// Greedy Vitali subcover: balls sorted by descending radius (ties by
/// center lex order), kept iff disjoint from every kept ball. Returns kept
/// indices into the input. Every input center lies in the 5x dilation of
/// some kept ball.
std::vector<size_t> vitali(const std::vector<Ball>& balls);

struct GoodBadPartition {
  std::vector<size_t> good;
  std::vector<size_t> bad;
};

/// Exact finite-sample version of the S_g / S_b definition: index i is good
/// iff every sample y within 5 r_x(i) of point i has r_x(y) >= r_x(i)/7.
GoodBadPartition partition_good_bad(const std::vector<std::vector<double>>& points,
                                    const std::vector<double>& r_x, double dilation = 5.0,
                                    double good_ratio = 7.0);

/// One covering step on a good-scale ball: Vitali subcover of the good set,
/// graph-alignment verification on subfamilies, dyadic covering of the bad
/// set, exclusion certificates on the dim V = n-2 branch. Output balls are
/// terminal (radius r) or carry degree d-1 with a certified smaller scale.
std::vector<ScaleBall> cover_good_scale(const FieldEvaluator& f, const ScaleBall& ball,
                                        int d, double r, double eps, const Config& cfg);

/// Recursive degree-descending covering of S_r(u) inside the given ball;
/// asserts every sampled point of S_r ends up inside a terminal dilation
/// and reports per-level masses.
CoverReport recursive_cover(const FieldEvaluator& f, double lambda, double r,
                            const std::vector<double>& center, double radius,
                            const Config& cfg);

}  // namespace almgren
