#pragma once

// Brute-force ground truth at desk scale: grid scans, enumeration of finite
// domains and quasi-random sampling of K.

#include <cstdint>
#include <string>
#include <vector>

#include "invpop/certify.hpp"

namespace invpop::oracle {

struct OracleResult {
  double value = 0.0;
  Point argmin;
  double resolution = 0.0;  // grid step of the final pass (0 for enumeration)
  long long samples = 0;    // points evaluated
  long long feasible = 0;   // points inside K
};

struct GridOptions {
  double feas_tol = 1e-9;
  bool refine = true;
  /// Refuses scans with more points than this per pass.
  long long max_points = 20'000'000;
};

/// Scans the grid lower + k*step over the box, keeps points in K, then scans
/// once more at step/10 around the incumbent. Ties go to the
/// lexicographically smallest point.
OracleResult grid_min(const Polynomiald& f, const FeasibleSet& K, const Box& box, double step,
                      const GridOptions& opt = {});

/// Exhaustive minimum over the product of finite value sets (e.g. {0,1}^n).
OracleResult enumerate_min(const Polynomiald& f, const FeasibleSet& K,
                           const std::vector<std::vector<double>>& values, double feas_tol = 1e-9);

/// Value sets {0,1} or {-1,1} per variable when every variable carries an
/// equality x_i^2 - x_i = 0 or x_i^2 - 1 = 0; empty otherwise.
std::vector<std::vector<double>> binary_values(const FeasibleSet& K);

inline constexpr std::uint32_t kDefaultSeed = 20240607u;

struct SampleResult {
  double value = 0.0;  // +inf when no sample is feasible
  Point argmin;
  long long samples = 0;
  long long feasible = 0;
  std::string warning;
};

/// Minimum of p over N Halton points in the box (Cranley-Patterson rotation
/// drawn from mt19937(seed)) that lie in K.
SampleResult sample_min(const Polynomiald& p, const FeasibleSet& K, const Box& box, long long N,
                        std::uint32_t seed = kDefaultSeed, double feas_tol = 1e-9);

/// Radical inverse of i in the given base.
double radical_inverse(long long i, int base);

}  // namespace invpop::oracle
