// Batch front end: plan | respond | equilibrium | social | sweep |
// simulate | render | scenarios. Exit codes: 0 success, 2 usage error,
// 3 infeasible, 4 solver limit without incumbent, 5 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathgames/game.hpp"
#include "pathgames/milp.hpp"
#include "pathgames/montecarlo.hpp"
#include "pathgames/planner.hpp"
#include "pathgames/profile_io.hpp"
#include "pathgames/render.hpp"
#include "pathgames/scenario.hpp"
#include "pathgames/sweep.hpp"

namespace {

using namespace pathgames;

struct CommonFlags {
  std::string scenario;
  std::optional<double> lambda;
  std::optional<int> horizon;
  std::optional<double> feedback_gain;
  std::uint64_t seed = 0;
  long trials = 1000;
  double time_limit = 120.0;
  long node_limit = 200000;
  std::string out;
  std::string dump_lp;
  bool legacy_margin = false;
  bool corrected_opposing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_scenario = true) {
  auto* opt = cmd->add_option("--scenario", f.scenario,
                              "Builtin scenario name or scenario file path");
  if (needs_scenario) opt->required();
  cmd->add_option("--lambda", f.lambda, "Efficiency/safety weight in [0,1]");
  cmd->add_option("--horizon", f.horizon, "Planning horizon (steps)");
  cmd->add_option("--feedback-gain", f.feedback_gain,
                  "Feedback gain k (overrides the scenario)");
  cmd->add_option("--seed", f.seed, "Simulation seed");
  cmd->add_option("--trials", f.trials, "Rollout trials");
  cmd->add_option("--time-limit", f.time_limit, "Solver time limit (s)");
  cmd->add_option("--node-limit", f.node_limit, "Solver node limit");
  cmd->add_option("--out", f.out, "Output file path");
  cmd->add_option("--dump-lp", f.dump_lp,
                  "Write the encoded model in LP text form to this path");
  cmd->add_flag("--legacy-margin", f.legacy_margin,
                "Drop the sqrt(2) factor in margin coefficients");
  cmd->add_flag("--corrected-opposing", f.corrected_opposing,
                "Use goal (5,50) for the opposing scenario's second agent");
}

ScenarioFile resolve_scenario(const CommonFlags& f) {
  const auto& names = builtin_scenario_names();
  for (const std::string& n : names) {
    if (f.scenario == n) {
      BuiltinOptions opt;
      opt.corrected_opposing = f.corrected_opposing;
      if (f.feedback_gain) opt.feedback_gain = *f.feedback_gain;
      return builtin_scenario(f.scenario, opt);
    }
  }
  std::ifstream probe(f.scenario);
  if (!probe.good()) {
    std::string known;
    for (const std::string& n : names) known += known.empty() ? n : ", " + n;
    throw ScenarioError("unknown scenario '" + f.scenario +
                        "': not a builtin (" + known + ") and no such file");
  }
  return load_scenario(f.scenario);
}

GameSpec resolve_game(const CommonFlags& f, const ScenarioFile& scenario) {
  ScenarioOverrides ov;
  ov.lambda = f.lambda;
  ov.horizon = f.horizon;
  ov.feedback_gain = f.feedback_gain;
  ov.legacy_margin = f.legacy_margin;
  return to_game_spec(scenario, ov);
}

SolveOptions solver_options(const CommonFlags& f) {
  SolveOptions s;
  s.time_limit_seconds = f.time_limit;
  s.node_limit = f.node_limit;
  return s;
}

std::vector<Polytope> parse_obstacles(const std::vector<std::string>& specs) {
  std::vector<Polytope> out;
  for (const std::string& s : specs) {
    double cx, cy, hx, hy;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &cx, &cy, &hx, &hy) != 4) {
      throw CLI::ValidationError(
          "--obstacle", "expected cx,cy,hx,hy but got '" + s + "'");
    }
    out.push_back(box({cx, cy}, {hx, hy}));
  }
  return out;
}

void maybe_dump_lp(const CommonFlags& f, const MilpModel& model) {
  if (f.dump_lp.empty()) return;
  std::ofstream os(f.dump_lp);
  if (!os) throw std::runtime_error("cannot write LP dump: " + f.dump_lp);
  write_lp(model, os);
}

void print_plan(const Plan& plan) {
  std::printf("agent %d: T_goal=%d  G=%.9g  J=%.9g  risk_bound=%.6g\n",
              plan.agent_id, plan.goal_step, plan.safety_term, plan.objective,
              plan.risk_bound);
}

void save_profile_document(const CommonFlags& f, const ScenarioFile& scenario,
                           const GameSpec& game, const std::string& mode,
                           const Profile& profile) {
  if (f.out.empty()) return;
  ProfileDocument doc;
  doc.scenario_name = scenario.name;
  doc.mode = mode;
  doc.lambda = game.params.lambda;
  doc.horizon = game.params.horizon;
  doc.feedback_gain = game.agents.front().feedback_gain;
  doc.profile = profile;
  save_profile(doc, f.out);
}

// Pick the game agents matching the profile's plans (by agent id).
GameSpec restrict_game(const GameSpec& full, const Profile& profile) {
  GameSpec g;
  g.params = full.params;
  for (const Plan& p : profile.plans) {
    g.agents.push_back(full.agent_by_id(p.agent_id));
  }
  return g;
}

int run_plan(const CommonFlags& f, int agent_index,
             const std::vector<std::string>& obstacle_specs) {
  ScenarioFile scenario = resolve_scenario(f);
  GameSpec game = resolve_game(f, scenario);
  if (agent_index < 0 || agent_index >= static_cast<int>(game.agents.size())) {
    throw CLI::ValidationError("--agent", "index out of range");
  }
  std::vector<Polytope> obstacles = parse_obstacles(obstacle_specs);
  PlanEncoding enc =
      encode_plan(game.agents[static_cast<size_t>(agent_index)], obstacles,
                  game.params);
  maybe_dump_lp(f, enc.model);
  MilpSolution sol = solve(enc.model, solver_options(f));
  Plan plan = decode_plan(sol, enc);
  print_plan(plan);
  Profile profile;
  profile.plans.push_back(plan);
  save_profile_document(f, scenario, game, "plan", profile);
  return 0;
}

int run_respond(const CommonFlags& f, int agent_id,
                const std::string& profile_path) {
  ScenarioFile scenario = resolve_scenario(f);
  GameSpec game = resolve_game(f, scenario);
  ProfileDocument doc = load_profile(profile_path);
  std::vector<std::pair<AgentSpec, Plan>> others;
  for (const Plan& p : doc.profile.plans) {
    if (p.agent_id != agent_id) {
      others.emplace_back(game.agent_by_id(p.agent_id), p);
    }
  }
  PlanEncoding enc = encode_best_response(game.agent_by_id(agent_id), others,
                                          game.params);
  maybe_dump_lp(f, enc.model);
  MilpSolution sol = solve(enc.model, solver_options(f));
  Plan response = decode_plan(sol, enc);
  print_plan(response);

  Profile merged;
  for (const AgentSpec& a : game.agents) {
    if (a.id == agent_id) {
      merged.plans.push_back(response);
      continue;
    }
    for (const Plan& p : doc.profile.plans) {
      if (p.agent_id == a.id) merged.plans.push_back(p);
    }
  }
  save_profile_document(f, scenario, game, "respond", merged);
  return 0;
}

int run_equilibrium(const CommonFlags& f, int max_rounds, double tol,
                    std::optional<unsigned long long> order_seed) {
  ScenarioFile scenario = resolve_scenario(f);
  GameSpec game = resolve_game(f, scenario);
  BrdOptions brd;
  brd.max_rounds = max_rounds;
  brd.tol = tol;
  brd.solver = solver_options(f);
  brd.shuffle_seed = order_seed;
  EquilibriumResult eq = best_response_dynamics(game, brd);
  std::printf("rounds=%d converged=%s epsilon=%.3g\n", eq.rounds,
              eq.converged ? "yes" : "no", eq.epsilon);
  for (const Plan& p : eq.profile.plans) print_plan(p);
  save_profile_document(f, scenario, game, "equilibrium", eq.profile);
  return 0;
}

int run_social(const CommonFlags& f) {
  ScenarioFile scenario = resolve_scenario(f);
  GameSpec game = resolve_game(f, scenario);
  if (!f.dump_lp.empty()) {
    JointEncoding enc = encode_joint_plan(game);
    maybe_dump_lp(f, enc.model);
  }
  SocialInfo info;
  Profile social = social_optimum(game, solver_options(f), &info);
  std::printf("status=%s gap=%.3g nodes=%ld total_J=%.9g\n",
              to_string(info.status), info.gap, info.nodes_explored,
              social.total_objective());
  for (const Plan& p : social.plans) print_plan(p);
  save_profile_document(f, scenario, game, "social", social);
  return 0;
}

int run_sweep_cmd(const CommonFlags& f, int max_rounds, int jobs) {
  ScenarioFile scenario = resolve_scenario(f);
  SweepOptions opt;
  opt.feedback_gain = f.feedback_gain;
  opt.horizon = f.horizon;
  opt.max_rounds = max_rounds;
  opt.trials = f.trials;
  opt.seed = f.seed;
  opt.solver = solver_options(f);
  opt.legacy_margin = f.legacy_margin;
  opt.jobs = jobs;
  std::vector<SweepRow> rows = run_sweep(scenario, opt);
  if (f.out.empty()) {
    write_sweep_csv(rows, std::cout);
  } else {
    std::ofstream os(f.out);
    if (!os) throw std::runtime_error("cannot write CSV: " + f.out);
    write_sweep_csv(rows, os);
  }
  return 0;
}

int run_simulate(const CommonFlags& f, const std::string& profile_path,
                 const std::vector<std::string>& obstacle_specs,
                 const std::string& trajectories_out) {
  ScenarioFile scenario = resolve_scenario(f);
  ProfileDocument doc = load_profile(profile_path);
  GameSpec game = restrict_game(resolve_game(f, scenario), doc.profile);
  RolloutConfig cfg;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.record_trajectories = !trajectories_out.empty();
  RolloutReport report =
      rollout(game, doc.profile, cfg, parse_obstacles(obstacle_specs));
  double bound = doc.profile.total_risk_bound();
  std::printf(
      "trials=%ld collision_rate=%.6g halfwidth=%.3g analytic_bound=%.6g "
      "bound_holds=%s goal_reach_rate=%.6g mean_goal_step=%.4g\n",
      report.trials, report.collision_rate, report.confidence_halfwidth,
      bound, validate_bound(report, doc.profile) ? "yes" : "no",
      report.goal_reach_rate, report.mean_goal_step);
  for (const auto& [pair, count] : report.collisions_by_pair) {
    if (pair.second >= 0) {
      std::printf("pair %d/%d: %ld trials\n", pair.first, pair.second, count);
    } else {
      std::printf("agent %d/obstacle %d: %ld trials\n", pair.first,
                  -(pair.second + 1), count);
    }
  }
  if (!trajectories_out.empty()) {
    std::ofstream os(trajectories_out);
    if (!os) {
      throw std::runtime_error("cannot write trajectories: " +
                               trajectories_out);
    }
    write_trajectories_csv(report, os);
  }
  return 0;
}

int run_render(const CommonFlags& f, const std::string& profile_path) {
  ScenarioFile scenario = resolve_scenario(f);
  ProfileDocument doc = load_profile(profile_path);
  if (f.out.empty()) {
    throw CLI::ValidationError("--out", "render requires an output path");
  }
  render_svg_file(scenario, doc.profile, f.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained path planning games solver suite"};
  app.require_subcommand(1);

  CommonFlags plan_flags, respond_flags, eq_flags, social_flags, sweep_flags,
      sim_flags, render_flags;
  int plan_agent = 0;
  std::vector<std::string> plan_obstacles;
  int respond_agent = 0;
  std::string respond_profile;
  int eq_max_rounds = 50;
  double eq_tol = 1e-6;
  std::optional<unsigned long long> eq_order_seed;
  int sweep_max_rounds = 20;
  int sweep_jobs = 0;
  std::string sim_profile;
  std::vector<std::string> sim_obstacles;
  std::string sim_traj_out;
  std::string render_profile;

  CLI::App* plan = app.add_subcommand(
      "plan", "Single-agent plan against static box obstacles");
  add_common(plan, plan_flags);
  plan->add_option("--agent", plan_agent, "Agent index within the scenario");
  plan->add_option("--obstacle", plan_obstacles,
                   "Static box obstacle cx,cy,hx,hy (repeatable)");

  CLI::App* respond = app.add_subcommand(
      "respond", "Best response against plans loaded from a profile");
  add_common(respond, respond_flags);
  respond->add_option("--agent", respond_agent, "Responding agent id");
  respond
      ->add_option("--profile", respond_profile,
                   "Profile file with the other agents' plans")
      ->required();

  CLI::App* equilibrium = app.add_subcommand(
      "equilibrium", "Best-response dynamics to an approximate equilibrium");
  add_common(equilibrium, eq_flags);
  equilibrium->add_option("--max-rounds", eq_max_rounds, "Round cap");
  equilibrium->add_option("--tol", eq_tol, "Convergence tolerance");
  equilibrium->add_option("--order-seed", eq_order_seed,
                          "Randomize the update order with this seed");

  CLI::App* social =
      app.add_subcommand("social", "Socially optimal joint plan");
  add_common(social, social_flags);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Equilibrium vs social comparison across the lambda grid");
  add_common(sweep, sweep_flags);
  sweep->add_option("--max-rounds", sweep_max_rounds, "BRD round cap");
  sweep->add_option("--jobs", sweep_jobs, "Parallel lambda points");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo rollout of a saved profile");
  add_common(simulate, sim_flags);
  simulate->add_option("--profile", sim_profile, "Profile file")->required();
  simulate->add_option("--obstacle", sim_obstacles,
                       "Static box obstacle cx,cy,hx,hy (repeatable)");
  simulate->add_option("--trajectories-out", sim_traj_out,
                       "Write per-trial trajectories CSV here");

  CLI::App* render =
      app.add_subcommand("render", "Render a saved profile to SVG");
  add_common(render, render_flags);
  render->add_option("--profile", render_profile, "Profile file")->required();

  CLI::App* scenarios =
      app.add_subcommand("scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help path
    std::fprintf(stderr, "pathgames: error: usage: %s\n", e.what());
    return 2;
  }

  try {
    if (scenarios->parsed()) {
      for (const std::string& name : builtin_scenario_names()) {
        std::printf("%s\n", name.c_str());
      }
      return 0;
    }
    if (plan->parsed()) return run_plan(plan_flags, plan_agent, plan_obstacles);
    if (respond->parsed()) {
      return run_respond(respond_flags, respond_agent, respond_profile);
    }
    if (equilibrium->parsed()) {
      return run_equilibrium(eq_flags, eq_max_rounds, eq_tol, eq_order_seed);
    }
    if (social->parsed()) return run_social(social_flags);
    if (sweep->parsed()) {
      return run_sweep_cmd(sweep_flags, sweep_max_rounds, sweep_jobs);
    }
    if (simulate->parsed()) {
      return run_simulate(sim_flags, sim_profile, sim_obstacles, sim_traj_out);
    }
    if (render->parsed()) return run_render(render_flags, render_profile);
    std::fprintf(stderr, "pathgames: error: usage: no subcommand given\n");
    return 2;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "pathgames: error: usage: %s\n", e.what());
    return 2;
  } catch (const InfeasibleSetupError& e) {
    std::fprintf(stderr, "pathgames: error: infeasible: %s\n", e.what());
    return 3;
  } catch (const NoPlanError& e) {
    if (e.status() == SolveStatus::kInfeasible) {
      std::fprintf(stderr, "pathgames: error: infeasible: %s\n", e.what());
      return 3;
    }
    std::fprintf(stderr, "pathgames: error: solver-limit: %s\n", e.what());
    return 4;
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "pathgames: error: usage: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "pathgames: error: usage: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "pathgames: error: io: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pathgames: error: internal: %s\n", e.what());
    return 1;
  }
}
