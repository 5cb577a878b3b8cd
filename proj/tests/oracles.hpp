#pragma once

// Independent reference computations used only by tests. These deliberately
// avoid the library's algorithms: the hull here is its own implementation,
// the erf oracle is a power series in extended precision, the covariance
// oracle evaluates the literal matrix-power sum, and the MILP oracle
// enumerates every binary assignment.

#include <vector>

#include "pathgames/geometry.hpp"
#include "pathgames/milp.hpp"
#include "pathgames/vec2.hpp"

namespace pathgames::oracles {

// Convex hull (CCW) of the pairwise sums {-a_i + b_j}.
std::vector<Vec2> minkowski_vertex_sum_hull(const std::vector<Vec2>& a,
                                            const std::vector<Vec2>& b);

// Hausdorff distance between two convex vertex sets.
double hull_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

// erf via the scaled all-positive power series in long double.
long double erf_series(long double x);

// Literal power-sum covariance: sum_{k=0}^{t-1} A^{t-k-1} S (A^T)^{t-k-1}.
Mat2 covariance_power_sum(const Mat2& a, const Mat2& sigma, int t);

struct BruteForceResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> values;
};

// Exhaustive enumeration over all binary assignments; the continuous
// remainder of each assignment is solved as an LP.
BruteForceResult brute_force_milp(const MilpModel& model);

// Random box-bounded MILP in the contract's shape: <=12 binaries, <=8
// continuous in [-20,20], <=15 constraints. Most rows are anchored to a
// random witness point so a healthy majority of instances are feasible;
// a minority are deliberately over-constrained.
MilpModel random_box_milp(unsigned long long seed);

}  // namespace pathgames::oracles
