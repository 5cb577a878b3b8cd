#pragma once

#include <limits>
#include <vector>

namespace pathgames::lp {

// Computational-form LP:
//   minimize  c.x   subject to   row_lower_i <= A_i . x <= row_upper_i,
//                                lower_j <= x_j <= upper_j.
// Equality rows use row_lower == row_upper. Infinite bounds are allowed on
// rows and (one-sided) on variables; the MILP layer only ever produces
// finite variable boxes.
struct LpProblem {
  int num_vars = 0;
  std::vector<double> cost;
  std::vector<double> lower, upper;
  // Dense rows.
  std::vector<std::vector<double>> rows;
  std::vector<double> row_lower, row_upper;

  int add_row(const std::vector<double>& coefs, double lo, double hi);
};

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterLimit,
  kNumericalError
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalError;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
  // Final basis snapshot (variable index per row, structural then slack);
  // reserved for warm starts.
  std::vector<int> basis;
};

struct LpOptions {
  int max_iterations = 0;      // 0 = automatic from problem size
  double feas_tol = 1e-9;      // bound/row feasibility
  double cost_tol = 1e-9;      // reduced-cost optimality threshold
  double pivot_tol = 1e-9;     // smallest acceptable pivot magnitude
  int refresh_every = 200;     // tableau recompute cadence (pivots)
};

// Bounded-variable primal simplex, dense tableau, two phases (artificials
// for initially violated rows), Dantzig pricing with a Bland anti-cycling
// fallback after a run of degenerate pivots. Deterministic.
LpResult solve_lp(const LpProblem& p, const LpOptions& options = {});

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace pathgames::lp
