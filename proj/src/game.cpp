#include "pathgames/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace pathgames {

void GameSpec::validate() const {
  if (agents.empty()) throw std::invalid_argument("game needs >= 1 agent");
  std::set<int> ids;
  for (const AgentSpec& a : agents) {
    if (!ids.insert(a.id).second) {
      throw std::invalid_argument("agent ids must be distinct");
    }
  }
  for (size_t i = 0; i < agents.size(); ++i) {
    for (size_t j = i + 1; j < agents.size(); ++j) {
      if ((agents[i].start - agents[j].start).norm_inf() == 0.0) {
        throw std::invalid_argument("agent starts must be pairwise distinct");
      }
    }
  }
  params.validate();
}

const AgentSpec& GameSpec::agent_by_id(int id) const {
  for (const AgentSpec& a : agents) {
    if (a.id == id) return a;
  }
  throw std::invalid_argument("unknown agent id " + std::to_string(id));
}

double Profile::total_objective() const {
  double sum = 0.0;
  for (const Plan& p : plans) sum += p.objective;
  return sum;
}

double Profile::total_risk_bound() const {
  double sum = 0.0;
  for (const Plan& p : plans) sum += p.risk_bound;
  return sum;
}

namespace {

// Obstacle-free plans are degenerate (no margin terms constrain the path),
// so the canonical representative is the constant-speed straight line: it
// attains the same minimum time and gives the dynamics a neutral start.
Plan initial_plan(const AgentSpec& agent, const PlanParams& params,
                  const SolveOptions& solver) {
  if (!agent.has_identity_dynamics()) {
    return solve_plan(agent, {}, params, solver);
  }
  Vec2 span = agent.goal - agent.start;
  int steps = static_cast<int>(
      std::ceil(span.norm_inf() / agent.control_bound - 1e-12));
  if (steps > params.horizon) {
    return solve_plan(agent, {}, params, solver);  // raises the usual error
  }
  Plan plan;
  plan.agent_id = agent.id;
  plan.goal_step = steps;
  plan.time_term = steps;
  plan.objective = params.lambda * steps;
  plan.safety_term = 0.0;
  plan.risk_bound = 0.0;
  Vec2 step_u = steps > 0 ? span / steps : Vec2{0, 0};
  plan.expected_trajectory.push_back(agent.start);
  for (int t = 0; t < params.horizon; ++t) {
    plan.controls.push_back(t < steps ? step_u : Vec2{0, 0});
    plan.expected_trajectory.push_back(
        t + 1 < steps ? agent.start + step_u * (t + 1) : agent.goal);
  }
  plan.goal_indicators.assign(static_cast<size_t>(params.horizon) + 1, 0);
  plan.goal_indicators[static_cast<size_t>(steps)] = 1;
  return plan;
}

std::vector<std::pair<AgentSpec, Plan>> fixed_others(const GameSpec& game,
                                                     const Profile& profile,
                                                     size_t self) {
  std::vector<std::pair<AgentSpec, Plan>> others;
  for (size_t j = 0; j < game.agents.size(); ++j) {
    if (j != self) others.emplace_back(game.agents[j], profile.plans[j]);
  }
  return others;
}

double max_control_change(const Plan& a, const Plan& b) {
  double worst = 0.0;
  size_t n = std::min(a.controls.size(), b.controls.size());
  for (size_t t = 0; t < n; ++t) {
    worst = std::max(worst, (a.controls[t] - b.controls[t]).norm_inf());
  }
  return worst;
}

}  // namespace

EquilibriumResult best_response_dynamics(const GameSpec& game,
                                         const BrdOptions& options) {
  game.validate();
  EquilibriumResult result;

  // Start from each agent's plan in an empty workspace.
  for (const AgentSpec& agent : game.agents) {
    try {
      result.profile.plans.push_back(
          initial_plan(agent, game.params, options.solver));
    } catch (const NoPlanError& e) {
      throw NoPlanError(e.status(),
                        "initial plan infeasible for agent " +
                            std::to_string(agent.id) + ": " + e.what());
    }
  }
  if (game.agents.size() == 1) {
    result.rounds = 1;
    result.converged = true;
    result.history.push_back({result.profile.plans[0].objective});
    return result;
  }

  std::vector<size_t> order(game.agents.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(options.shuffle_seed.value_or(0));

  for (int round = 1; round <= options.max_rounds; ++round) {
    if (options.shuffle_seed) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
    }
    double worst_control_change = 0.0;
    double worst_improvement = 0.0;
    for (size_t idx : order) {
      const AgentSpec& agent = game.agents[idx];
      Plan previous = result.profile.plans[idx];
      auto others = fixed_others(game, result.profile, idx);
      Plan response;
      try {
        response = solve_best_response(agent, others, game.params,
                                       options.solver, &previous);
      } catch (const NoPlanError& e) {
        throw NoPlanError(e.status(), "best response infeasible for agent " +
                                          std::to_string(agent.id) +
                                          " in round " +
                                          std::to_string(round) + ": " +
                                          e.what());
      }
      // Improvement of the re-solve over keeping the previous plan, both
      // measured against the opponents as they currently stand.
      double previous_value =
          evaluate_plan(agent, previous, others, game.params);
      double improvement = previous_value - response.objective;
      worst_control_change = std::max(worst_control_change,
                                      max_control_change(previous, response));
      worst_improvement = std::max(worst_improvement, std::max(0.0, improvement));
      result.profile.plans[idx] = std::move(response);
    }
    std::vector<double> round_objectives;
    for (const Plan& p : result.profile.plans) {
      round_objectives.push_back(p.objective);
    }
    result.history.push_back(std::move(round_objectives));
    result.rounds = round;
    result.epsilon = worst_improvement;
    if (worst_control_change <= options.tol &&
        worst_improvement <= options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

EquilibriumCheck verify_equilibrium(const GameSpec& game,
                                    const Profile& profile, double epsilon,
                                    const SolveOptions& solver) {
  game.validate();
  if (profile.plans.size() != game.agents.size()) {
    throw std::invalid_argument("profile does not match the game");
  }
  EquilibriumCheck check;
  for (size_t i = 0; i < game.agents.size(); ++i) {
    PlanEncoding enc = encode_best_response(
        game.agents[i], fixed_others(game, profile, i), game.params);
    MilpSolution sol = solve(enc.model, solver);
    Plan best = decode_plan(sol, enc);
    AgentSlack slack;
    slack.agent_id = game.agents[i].id;
    slack.slack = profile.plans[i].objective - best.objective;
    slack.lower_bound_only = sol.status == SolveStatus::kFeasible;
    check.max_slack = std::max(check.max_slack, slack.slack);
    check.slacks.push_back(slack);
  }
  check.is_equilibrium = check.max_slack <= epsilon;
  return check;
}

JointEncoding encode_joint_plan(const GameSpec& game) {
  game.validate();
  JointEncoding enc;
  enc.params = game.params;
  const size_t n = game.agents.size();
  for (const AgentSpec& agent : game.agents) {
    enc.vars.push_back(add_agent_vars(enc.model, agent, game.params));
  }

  // Origin-relative pair volumes; the (i,j) and (j,i) sets must mirror.
  std::vector<std::vector<Polytope>> pair_volume(n, std::vector<Polytope>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      pair_volume[i][j] = collision_volume(
          game.agents[i].shape, game.agents[j].shape.relative_region());
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (hausdorff_distance(pair_volume[i][j], reflect(pair_volume[j][i])) >
          1e-9) {
        throw std::logic_error(
            "pair volume mirror identity violated: K_ij != -K_ji");
      }
    }
  }

  for (size_t i = 0; i < n; ++i) {
    CovarianceSchedule cov_i = enc.vars[i].cov;
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const AgentSpec& other = game.agents[j];
      Polytope base = translate(pair_volume[i][j], other.start);
      if (contains(base, game.agents[i].start)) {
        throw InfeasibleSetupError(
            "agents " + std::to_string(game.agents[i].id) + " and " +
            std::to_string(other.id) + " start in collision");
      }
      MovingVolumeSpec vol;
      vol.constraint_id = other.id;
      vol.other_agent = other.id;
      vol.base = std::move(base);
      vol.other_goal_vars = enc.vars[j].d;
      for (int t = 0; t <= game.params.horizon; ++t) {
        vol.offsets.push_back(
            {enc.vars[j].r[static_cast<size_t>(t)][0] - LinearExpr(other.start.x),
             enc.vars[j].r[static_cast<size_t>(t)][1] -
                 LinearExpr(other.start.y)});
        vol.covariances.push_back(cov_i.at(t) + enc.vars[j].cov.at(t));
      }
      add_volume_rows(enc.model, enc.vars[i], vol, game.params);
    }
  }

  LinearExpr objective;
  for (const AgentVars& av : enc.vars) {
    objective += agent_objective(av, game.params);
  }
  enc.model.set_objective(std::move(objective));
  return enc;
}

Profile decode_joint(const MilpSolution& solution, const JointEncoding& enc) {
  // Goal steps first so pair margins can be attributed on decode.
  std::vector<std::pair<int, int>> goal_steps;  // (agent id, step)
  for (const AgentVars& av : enc.vars) {
    int step = -1;
    for (size_t t = 0; t < av.d.size(); ++t) {
      if (solution.value(av.d[t]) > 0.5) step = static_cast<int>(t);
    }
    goal_steps.emplace_back(av.agent.id, step);
  }
  auto resolve = [&goal_steps](int agent_id) {
    for (const auto& [id, step] : goal_steps) {
      if (id == agent_id) return step;
    }
    return -1;
  };
  Profile profile;
  for (const AgentVars& av : enc.vars) {
    profile.plans.push_back(decode_agent(solution, av, enc.params, resolve));
  }
  return profile;
}

namespace {

// Map a feasible profile onto the joint model's variables. Returns an empty
// vector when the mapping fails a feasibility replay.
std::vector<double> joint_warm_start(const JointEncoding& enc,
                                     const Profile& profile) {
  const MilpModel& model = enc.model;
  std::vector<double> values(static_cast<size_t>(model.num_variables()), 0.0);
  for (size_t i = 0; i < enc.vars.size(); ++i) {
    const AgentVars& av = enc.vars[i];
    const Plan& plan = profile.plans[i];
    if (plan.controls.size() != av.u.size()) return {};
    for (size_t t = 0; t < av.u.size(); ++t) {
      values[static_cast<size_t>(av.u[t][0].index)] = plan.controls[t].x;
      values[static_cast<size_t>(av.u[t][1].index)] = plan.controls[t].y;
    }
    for (size_t t = 0; t < av.d.size(); ++t) {
      values[static_cast<size_t>(av.d[t].index)] =
          plan.goal_step == static_cast<int>(t) ? 1.0 : 0.0;
    }
    // Position variables exist only off the identity-dynamics path.
    if (!av.agent.has_identity_dynamics()) {
      for (size_t t = 1; t < av.r.size(); ++t) {
        for (int c = 0; c < 2; ++c) {
          const auto& terms = av.r[t][static_cast<size_t>(c)].terms();
          if (terms.size() == 1 && terms[0].second == 1.0) {
            Vec2 pos = plan.expected_trajectory[t];
            values[static_cast<size_t>(terms[0].first.index)] =
                c == 0 ? pos.x : pos.y;
          }
        }
      }
    }
  }
  // Margins and face selectors per volume step.
  for (size_t i = 0; i < enc.vars.size(); ++i) {
    const AgentVars& av = enc.vars[i];
    const Plan& plan = profile.plans[i];
    for (const VolumeStepEntry& e : av.volume_steps) {
      const Plan* other_plan = nullptr;
      for (size_t j = 0; j < enc.vars.size(); ++j) {
        if (enc.vars[j].agent.id == e.other_agent) {
          other_plan = &profile.plans[j];
        }
      }
      if (!other_plan) return {};
      Vec2 own = plan.expected_trajectory[static_cast<size_t>(e.step)];
      Vec2 shift =
          other_plan->expected_trajectory[static_cast<size_t>(e.step)] -
          other_plan->expected_trajectory[0];
      // The goal-relax sum hits 1 at the arrival step itself.
      bool relaxed =
          e.step >= plan.goal_step || e.step >= other_plan->goal_step;
      if (!e.has_rows) {
        values[static_cast<size_t>(e.margin.index)] = enc.params.margin_cap;
        continue;
      }
      double best_ratio = -1.0;
      size_t best_face = 0;
      for (size_t p = 0; p < e.faces.size(); ++p) {
        const FaceEntry& f = e.faces[p];
        double slack = f.normal.dot(own - shift) - f.base_offset;
        double ratio = f.coefficient > 1e-12
                           ? slack / f.coefficient
                           : (slack >= -1e-9 ? enc.params.margin_cap * 2 : -1);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best_face = p;
        }
      }
      if (relaxed) {
        values[static_cast<size_t>(e.margin.index)] = enc.params.margin_cap;
        values[static_cast<size_t>(e.faces[best_face].z.index)] = 1.0;
        continue;
      }
      if (best_ratio < 0.0) return {};  // profile collides: not a warm start
      values[static_cast<size_t>(e.margin.index)] =
          std::min(enc.params.margin_cap, best_ratio);
      values[static_cast<size_t>(e.faces[best_face].z.index)] = 1.0;
    }
  }
  if (!check_solution(model, values)) return {};
  return values;
}

}  // namespace

Profile social_optimum(const GameSpec& game, const SolveOptions& options,
                       SocialInfo* info, const Profile* warm_start) {
  JointEncoding enc = encode_joint_plan(game);
  SolveOptions opts = options;
  if (warm_start && warm_start->plans.size() == game.agents.size()) {
    std::vector<double> seed = joint_warm_start(enc, *warm_start);
    if (!seed.empty()) opts.initial_solution = std::move(seed);
  }
  MilpSolution sol = solve(enc.model, opts);
  if (info) {
    info->status = sol.status;
    info->gap = sol.gap;
    info->nodes_explored = sol.nodes_explored;
    info->wall_time_seconds = sol.wall_time_seconds;
  }
  if (sol.status == SolveStatus::kInfeasible) {
    throw NoPlanError(sol.status, "joint plan infeasible");
  }
  if (!sol.has_values()) {
    throw NoPlanError(sol.status, "joint solve hit limits with no incumbent");
  }
  return decode_joint(sol, enc);
}

OutcomeComparison compare_outcomes(const EquilibriumResult& equilibrium,
                                   const Profile& social) {
  const auto& eq = equilibrium.profile.plans;
  const auto& so = social.plans;
  if (eq.size() != so.size() || eq.empty()) {
    throw std::invalid_argument("profiles compare only over identical games");
  }
  for (size_t i = 0; i < eq.size(); ++i) {
    if (eq[i].agent_id != so[i].agent_id) {
      throw std::invalid_argument("profiles compare only over identical games");
    }
  }
  OutcomeComparison out;
  const double n = static_cast<double>(eq.size());
  for (size_t i = 0; i < eq.size(); ++i) {
    out.mean_j_equilibrium += eq[i].objective / n;
    out.mean_j_social += so[i].objective / n;
    out.mean_t_equilibrium += eq[i].time_term / n;
    out.mean_t_social += so[i].time_term / n;
    out.mean_g_equilibrium += eq[i].safety_term / n;
    out.mean_g_social += so[i].safety_term / n;
  }
  return out;
}

}  // namespace pathgames
