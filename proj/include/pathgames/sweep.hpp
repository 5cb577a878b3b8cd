#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathgames/montecarlo.hpp"
#include "pathgames/scenario.hpp"

namespace pathgames {

// One CSV row: a single agent (or the per-agent mean) under one lambda and
// one solution mode.
struct SweepRow {
  std::string scenario;
  double lambda = 0.0;
  std::string mode;  // equilibrium | social
  double feedback_gain = 0.0;
  std::string agent_id;  // index or "mean"
  double t_goal = 0.0;
  double g = 0.0;
  double j = 0.0;
  double risk_bound = 0.0;
  double empirical_rate = 0.0;  // mean row: whole-profile collision rate
  int rounds = 0;               // best-response rounds (0 for social)
  std::string solver_status;
};

struct SweepOptions {
  std::optional<double> feedback_gain;
  std::optional<int> horizon;
  int max_rounds = 20;
  double brd_tol = 1e-6;
  long trials = 1000;
  std::uint64_t seed = 0;
  SolveOptions solver;
  bool legacy_margin = false;
  int jobs = 0;  // parallel lambda points; 0 = hardware default
};

// For each lambda in the grid: best-response dynamics and the social
// optimum, each validated by rollout. Failures are recorded in
// solver_status and the sweep continues.
std::vector<SweepRow> run_sweep(const ScenarioFile& scenario,
                                const SweepOptions& options = {});

// Fixed header, 9 significant digits, locale-independent.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace pathgames
