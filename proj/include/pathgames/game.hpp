#pragma once

#include <optional>
#include <vector>

#include "pathgames/planner.hpp"

namespace pathgames {

struct GameSpec {
  std::vector<AgentSpec> agents;
  PlanParams params;  // shared by all players

  void validate() const;
  const AgentSpec& agent_by_id(int id) const;
};

struct Profile {
  std::vector<Plan> plans;  // aligned with GameSpec::agents

  double total_objective() const;
  double total_risk_bound() const;
};

struct EquilibriumResult {
  Profile profile;
  int rounds = 0;
  bool converged = false;
  // history[r][i] = agent i's objective after round r+1.
  std::vector<std::vector<double>> history;
  double epsilon = 0.0;  // largest final-round improvement observed
};

struct BrdOptions {
  int max_rounds = 50;
  double tol = 1e-6;
  SolveOptions solver;
  // Randomized update order (seeded) instead of ascending agent id.
  std::optional<unsigned long long> shuffle_seed;
};

// Round-robin best-response dynamics from obstacle-free initial plans.
// Throws NoPlanError naming the agent and round if a response is infeasible.
EquilibriumResult best_response_dynamics(const GameSpec& game,
                                         const BrdOptions& options = {});

struct AgentSlack {
  int agent_id = 0;
  double slack = 0.0;            // J(profile) - J(best response)
  bool lower_bound_only = false; // solver limit: true slack may be larger
};

struct EquilibriumCheck {
  bool is_equilibrium = false;
  double max_slack = 0.0;
  std::vector<AgentSlack> slacks;
};

// Re-solves every agent's best response against the fixed profile and
// reports the per-agent objective slack (an epsilon-equilibrium certificate).
EquilibriumCheck verify_equilibrium(const GameSpec& game,
                                    const Profile& profile, double epsilon,
                                    const SolveOptions& solver = {});

struct JointEncoding {
  MilpModel model;
  std::vector<AgentVars> vars;
  PlanParams params;
};

// One program over every agent's variables with collision rows for every
// ordered pair, relaxed once either side has reached its goal.
JointEncoding encode_joint_plan(const GameSpec& game);

struct SocialInfo {
  SolveStatus status = SolveStatus::kLimitReached;
  double gap = 0.0;
  long nodes_explored = 0;
  double wall_time_seconds = 0.0;
};

// Minimizes the sum of all agents' objectives. `warm_start`, when given and
// feasible, seeds the search (typically with an equilibrium profile).
Profile social_optimum(const GameSpec& game, const SolveOptions& options = {},
                       SocialInfo* info = nullptr,
                       const Profile* warm_start = nullptr);

Profile decode_joint(const MilpSolution& solution, const JointEncoding& enc);

struct OutcomeComparison {
  double mean_j_equilibrium = 0.0, mean_j_social = 0.0;
  double mean_t_equilibrium = 0.0, mean_t_social = 0.0;
  double mean_g_equilibrium = 0.0, mean_g_social = 0.0;
};

// Per-agent means of objective, time-to-goal and safety term.
OutcomeComparison compare_outcomes(const EquilibriumResult& equilibrium,
                                   const Profile& social);

}  // namespace pathgames
