#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace almgren {

/// Deterministic RNG with explicit bit-level distributions; avoids
/// std::uniform_real_distribution so streams are identical everywhere.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(uint64_t seed) : eng(seed) {}
  uint64_t next_u64() { return eng(); }
  /// Uniform in [0,1).
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }
};

/// Quasi-uniform points on the unit sphere S^{n-1}; deterministic.
/// n=2 uses equispaced angles, n=3 a Fibonacci lattice, higher n a
/// low-discrepancy sequence pushed through the Gaussian map.
std::vector<std::vector<double>> sphere_points(int n, int count);

/// Quasi-uniform points in the closed unit ball of R^n; deterministic.
std::vector<std::vector<double>> ball_points(int n, int count);

/// Halton radical-inverse in the given prime base, index >= 0.
double halton(uint64_t index, uint32_t base);

}  // namespace almgren
