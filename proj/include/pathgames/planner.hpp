#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathgames/geometry.hpp"
#include "pathgames/milp.hpp"
#include "pathgames/stochastic.hpp"
#include "pathgames/vec2.hpp"

namespace pathgames {

struct AgentSpec {
  int id = 0;
  AgentShape shape;
  Mat2 A = Mat2::identity();
  Mat2 B = Mat2::identity();
  NoiseModel noise;
  double control_bound = 1.0;  // per-axis |u| <= bound
  Vec2 start;
  Vec2 goal;
  double feedback_gain = 0.0;

  Mat2 closed_loop() const { return closed_loop_matrix(A, B, feedback_gain); }
  bool has_identity_dynamics() const {
    return A == Mat2::identity() && B == Mat2::identity();
  }
};

struct PlanParams {
  int horizon = 12;
  double lambda = 0.5;
  double big_m = 1e4;
  double margin_cap = 4.0;  // cap on margin variables; erf(cap) ~ 1
  double goal_tolerance = 1e-6;
  bool legacy_margin = false;  // drop the sqrt(2) in margin coefficients
  // Adds interval-tightened duplicates of the big-M rows. They never change
  // the set of integer-feasible plans or the optimum; they only sharpen the
  // LP relaxations.
  bool strengthen_relaxation = true;

  void validate() const;
};

// One margin variable s(n,t) and how it entered the program.
struct MarginRecord {
  int constraint_id = -1;  // obstacle index or opponent agent id
  int other_agent = -1;    // opponent agent id, -1 for static obstacles
  int step = 0;
  double value = 0.0;
  int selected_face = -1;
  // Whether this term enters the reported collision-probability bound
  // (rows relaxed after goal arrival do not).
  bool counted = false;
};

struct Plan {
  int agent_id = 0;
  std::vector<Vec2> controls;             // t = 0..horizon-1 (zero after goal)
  std::vector<Vec2> expected_trajectory;  // t = 0..horizon (held at goal)
  int goal_step = 0;
  std::vector<int> goal_indicators;  // d_t
  std::vector<MarginRecord> margins;
  double safety_term = 0.0;  // G = -sum of every margin variable
  double time_term = 0.0;    // T_goal
  double objective = 0.0;    // lambda*T + (1-lambda)*G
  double risk_bound = 0.0;   // sum of tail bounds over counted margins
};

// Sum of risk_from_margin over the plan's counted margin terms.
double plan_risk_bound(const Plan& plan);

class NoPlanError : public std::runtime_error {
 public:
  NoPlanError(SolveStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  SolveStatus status() const { return status_; }

 private:
  SolveStatus status_;
};

class InfeasibleSetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- encoding building blocks (shared with the joint program) ----

struct FaceEntry {
  Vec2 normal;
  double base_offset = 0.0;  // b at the reference placement
  double coefficient = 0.0;  // multiplies the margin variable
  VarId z;                   // face-selection binary; invalid when fixed
  bool fixed = false;        // face provably separating at full margin
};

struct VolumeStepEntry {
  int constraint_id = -1;
  int other_agent = -1;
  int step = 0;
  VarId margin;
  std::vector<FaceEntry> faces;
  bool has_rows = false;  // false when the whole step was proven slack
  Vec2 offset;            // volume shift at this step when constant
  bool offset_constant = true;
};

// One agent's variables inside a model: controls, goal indicators, position
// expressions, and the margin bookkeeping filled in by add_volume_rows.
struct AgentVars {
  AgentSpec agent;
  std::vector<std::array<VarId, 2>> u;             // horizon entries
  std::vector<VarId> d;                            // horizon+1 entries
  std::vector<std::array<LinearExpr, 2>> r;        // horizon+1 entries
  CovarianceSchedule cov;
  std::vector<VolumeStepEntry> volume_steps;
};

// A collision volume moving along per-step offsets (constants for fixed
// opponent plans, expressions for jointly planned ones).
struct MovingVolumeSpec {
  int constraint_id = -1;
  int other_agent = -1;
  Polytope base;  // volume of reference positions at the initial placement
  std::vector<std::array<LinearExpr, 2>> offsets;  // one per step 0..last
  std::vector<Mat2> covariances;                   // one per step 0..last
  std::vector<VarId> other_goal_vars;  // opponent d's (joint program only)
};

// Controls, goal indicators, goal rows and position expressions (or
// variables plus dynamics rows when A,B are not both identity).
AgentVars add_agent_vars(MilpModel& model, const AgentSpec& agent,
                         const PlanParams& params);

// Disjunctive face rows with margins for one moving volume against one
// agent. Throws std::invalid_argument when big_m cannot deactivate a row.
void add_volume_rows(MilpModel& model, AgentVars& av,
                     const MovingVolumeSpec& vol, const PlanParams& params);

// lambda * sum t*d_t + (1-lambda) * (-sum margins).
LinearExpr agent_objective(const AgentVars& av, const PlanParams& params);

// Decode one agent out of a solved model. `other_goal_step` resolves an
// opponent id to its decoded goal step (joint program); margins at steps
// after either side's arrival are not counted in the risk bound.
Plan decode_agent(const MilpSolution& solution, const AgentVars& av,
                  const PlanParams& params,
                  const std::function<int(int)>& other_goal_step = {});

// ---- single-agent programs ----

struct PlanEncoding {
  MilpModel model;
  AgentVars vars;
  PlanParams params;
};

// Minimum-time / maximum-margin program against static obstacles.
PlanEncoding encode_plan(const AgentSpec& agent,
                         const std::vector<Polytope>& obstacles,
                         const PlanParams& params);

// Best response against opponents with fixed plans: their bodies become
// moving collision volumes and their motion noise is migrated onto the
// planning agent (combined covariance per step).
PlanEncoding encode_best_response(
    const AgentSpec& agent,
    const std::vector<std::pair<AgentSpec, Plan>>& others,
    const PlanParams& params);

Plan decode_plan(const MilpSolution& solution, const PlanEncoding& encoding);

// encode + solve + decode convenience.
Plan solve_plan(const AgentSpec& agent, const std::vector<Polytope>& obstacles,
                const PlanParams& params, const SolveOptions& options = {});
// `warm_start`, when given and still feasible, seeds the search as the
// incumbent; ties then keep the previous plan instead of drifting between
// equal-objective vertices.
Plan solve_best_response(const AgentSpec& agent,
                         const std::vector<std::pair<AgentSpec, Plan>>& others,
                         const PlanParams& params,
                         const SolveOptions& options = {},
                         const Plan* warm_start = nullptr);

// Maps a plan onto an encoding's variables (margins set to the largest
// values the trajectory supports). Empty when the plan is not feasible for
// the encoded program.
std::vector<double> encode_warm_start(const PlanEncoding& encoding,
                                      const Plan& plan);

// Objective of a fixed plan re-evaluated against (possibly different)
// opponents: margins are the largest values its trajectory supports. +inf
// when the trajectory is inside some active collision volume.
double evaluate_plan(const AgentSpec& agent, const Plan& plan,
                     const std::vector<std::pair<AgentSpec, Plan>>& others,
                     const PlanParams& params);

}  // namespace pathgames
