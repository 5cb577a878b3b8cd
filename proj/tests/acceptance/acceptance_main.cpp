// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pathgames/game.hpp"
#include "pathgames/milp.hpp"
#include "pathgames/montecarlo.hpp"
#include "pathgames/planner.hpp"
#include "pathgames/scenario.hpp"
#include "pathgames/stochastic.hpp"
#include "pathgames/sweep.hpp"

using namespace pathgames;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %-28s (%.1fs) %s\n", pass ? "PASS" : "FAIL",
              number, name.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run(int number, const std::string& name,
         const std::function<bool(std::string&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(number, name, pass, secs, detail);
}

AgentSpec opposing_agent0() {
  ScenarioFile s = builtin_scenario("opposing");
  ScenarioOverrides ov;
  GameSpec g = to_game_spec(s, ov);
  return g.agents[0];
}

bool criterion_1(std::string& detail) {
  AgentSpec agent = opposing_agent0();
  PlanParams params;
  params.horizon = 12;
  params.lambda = 1.0;
  auto t0 = std::chrono::steady_clock::now();
  Plan plan = solve_plan(agent, {}, params);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream os;
  os << "T_goal=" << plan.goal_step << " solve=" << secs << "s";
  detail = os.str();
  return plan.goal_step == 9 && secs < 10.0;
}

bool criterion_2(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  SolveOptions opts;
  opts.gap_tol = 1e-9;
  int feasible = 0, infeasible = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    MilpModel m = oracles::random_box_milp(20240809ULL + trial);
    MilpSolution s = solve(m, opts);
    auto oracle = oracles::brute_force_milp(m);
    if (oracle.feasible != (s.status == SolveStatus::kOptimal)) {
      detail = "status mismatch on trial " + std::to_string(trial);
      return false;
    }
    if (oracle.feasible) {
      ++feasible;
      worst = std::max(worst, std::abs(s.objective - oracle.objective));
      if (std::abs(s.objective - oracle.objective) > 1e-6) {
        detail = "objective mismatch on trial " + std::to_string(trial);
        return false;
      }
    } else {
      ++infeasible;
    }
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream os;
  os << feasible << " feasible / " << infeasible
     << " infeasible, worst diff=" << worst << ", total=" << secs << "s";
  detail = os.str();
  return secs < 60.0;
}

bool criterion_3(std::string& detail) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<int> count(3, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto polygon = [&] {
      std::vector<Vec2> pts;
      int n = count(rng);
      for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
      return Polytope::from_points(pts).vertices();
    };
    std::vector<Vec2> va = polygon();
    std::vector<Vec2> vb = polygon();
    Polytope a = Polytope::from_points(va);
    Vec2 c = a.centroid();
    AgentShape agent(translate(a, -c));
    Polytope k = collision_volume(agent, Polytope::from_points(vb));
    auto oracle = oracles::minkowski_vertex_sum_hull(
        agent.relative_region().vertices(), vb);
    double h = oracles::hull_hausdorff(k.vertices(), oracle);
    worst = std::max(worst, h);
    if (h > 1e-9) {
      detail = "Hausdorff " + std::to_string(h) + " on trial " +
               std::to_string(trial);
      return false;
    }
  }
  std::ostringstream os;
  os << "100 pairs, worst Hausdorff=" << worst;
  detail = os.str();
  return true;
}

bool criterion_4(std::string& detail) {
  AgentSpec agent = opposing_agent0();
  PlanParams params;
  params.horizon = 12;
  params.lambda = 0.5;
  Polytope obstacle = box({50, 47}, {6, 6});
  Plan plan = solve_plan(agent, {obstacle}, params);

  GameSpec game;
  game.agents = {agent};
  game.params = params;
  Profile profile;
  profile.plans.push_back(plan);
  RolloutConfig cfg;
  cfg.trials = 10000;
  cfg.seed = 190537;
  RolloutReport report = rollout(game, profile, cfg, {obstacle});
  std::ostringstream os;
  os << "empirical=" << report.collision_rate
     << " bound=" << profile.total_risk_bound()
     << " halfwidth=" << report.confidence_halfwidth;
  detail = os.str();
  return validate_bound(report, profile);
}

bool criterion_5(std::string& detail) {
  for (double g : {1e-6, 1e-4, 0.01, 0.1, 0.4}) {
    double back = risk_from_margin(erf_inv(1.0 - 2.0 * g));
    if (std::abs(back - g) > 1e-9) {
      detail = "roundtrip failed at g=" + std::to_string(g);
      return false;
    }
  }
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    double x = -6.0 + 12.0 * i / 1000.0;
    double err = std::abs(pathgames::erf(x) -
                          static_cast<double>(oracles::erf_series(x)));
    worst = std::max(worst, err);
  }
  std::ostringstream os;
  os << "roundtrips ok, worst erf error=" << worst;
  detail = os.str();
  return worst <= 1e-12;
}

bool criterion_6(std::string& detail) {
  NoiseModel noise = NoiseModel::isotropic(1.9);
  CovarianceSchedule identity =
      propagate_covariance(Mat2::identity(), noise, 20);
  for (int t = 0; t <= 20; ++t) {
    Mat2 expected = Mat2::scale(1.9 * t);
    Mat2 got = identity.at(t);
    if (std::abs(got.a - expected.a) > 1e-12 ||
        std::abs(got.d - expected.d) > 1e-12 || got.b != 0.0 || got.c != 0.0) {
      detail = "identity-dynamics schedule wrong at t=" + std::to_string(t);
      return false;
    }
  }
  Mat2 half = Mat2::scale(0.5);
  CovarianceSchedule contracting = propagate_covariance(half, noise, 40);
  double rho = half.spectral_radius();
  double bound = noise.sigma().trace() / (1.0 - rho * rho);
  double prev = -1.0;
  for (int t = 0; t <= 40; ++t) {
    double tr = contracting.at(t).trace();
    if (tr < prev - 1e-15 || tr > bound + 1e-9) {
      detail = "trace not monotone within the geometric bound at t=" +
               std::to_string(t);
      return false;
    }
    prev = tr;
  }
  std::ostringstream os;
  os << "final trace gap=" << bound - prev;
  detail = os.str();
  return std::abs(bound - prev) <= 1e-9;
}

struct SweepOutcome {
  std::string csv;
  // (scenario, lambda) -> mean rows present and Optimal on both modes
  struct Point {
    std::string scenario;
    double lambda;
    bool both_optimal;
    double mean_t_eq, mean_g_eq, mean_j_eq;
    double mean_t_so, mean_g_so, mean_j_so;
    int agents;
  };
  std::vector<Point> points;
};

SweepOutcome run_criterion7_sweeps() {
  SweepOutcome out;
  std::string csv;
  for (const std::string& name : {std::string("opposing"), std::string("parallel")}) {
    ScenarioFile scenario = builtin_scenario(name);
    scenario.lambda_grid = {0.1, 0.3, 0.5};
    scenario.defaults.horizon = 12;
    SweepOptions opt;
    opt.trials = 2000;
    opt.seed = 424242;
    opt.max_rounds = 20;
    opt.solver.time_limit_seconds = 600.0;
    std::vector<SweepRow> rows = run_sweep(scenario, opt);
    csv += sweep_csv(rows);
    for (double lambda : scenario.lambda_grid) {
      SweepOutcome::Point pt;
      pt.scenario = name;
      pt.lambda = lambda;
      pt.agents = static_cast<int>(scenario.agents.size());
      bool eq_ok = false, so_ok = false;
      for (const SweepRow& r : rows) {
        if (r.lambda != lambda || r.agent_id != "mean") continue;
        if (r.mode == "equilibrium") {
          eq_ok = r.solver_status == "converged";
          pt.mean_t_eq = r.t_goal;
          pt.mean_g_eq = r.g;
          pt.mean_j_eq = r.j;
        } else if (r.mode == "social") {
          so_ok = r.solver_status == "Optimal";
          pt.mean_t_so = r.t_goal;
          pt.mean_g_so = r.g;
          pt.mean_j_so = r.j;
        }
      }
      pt.both_optimal = eq_ok && so_ok;
      out.points.push_back(pt);
    }
  }
  out.csv = csv;
  return out;
}

SweepOutcome g_sweep7;  // shared between criteria 7, 9 and 10

bool criterion_7(std::string& detail) {
  g_sweep7 = run_criterion7_sweeps();
  int usable = 0, excluded = 0;
  for (const auto& pt : g_sweep7.points) {
    if (!pt.both_optimal) {
      ++excluded;
      std::printf("    excluded (not Optimal): %s lambda=%.1f\n",
                  pt.scenario.c_str(), pt.lambda);
      continue;
    }
    ++usable;
    if (!(pt.mean_g_eq >= pt.mean_g_so - 1e-6)) {
      detail = pt.scenario + " lambda=" + std::to_string(pt.lambda) +
               ": mean G(eq) < mean G(social)";
      return false;
    }
    if (!(pt.mean_t_eq <= pt.mean_t_so + 1e-6)) {
      detail = pt.scenario + " lambda=" + std::to_string(pt.lambda) +
               ": mean T(eq) > mean T(social)";
      return false;
    }
  }
  std::ostringstream os;
  os << usable << " lambda-points checked, " << excluded << " excluded";
  detail = os.str();
  return usable > 0;
}

bool criterion_8(std::string& detail) {
  std::ostringstream os;
  bool all_ok = true;
  for (const std::string& name : builtin_scenario_names()) {
    ScenarioFile scenario = builtin_scenario(name);
    ScenarioOverrides ov;
    ov.horizon = 12;
    GameSpec game = to_game_spec(scenario, ov);
    BrdOptions brd;
    brd.max_rounds = 20;
    brd.solver.time_limit_seconds = 600.0;
    EquilibriumResult eq = best_response_dynamics(game, brd);
    if (!eq.converged) {
      os << name << ": no convergence within 20 rounds (epsilon="
         << eq.epsilon << "); ";
      continue;  // an honest non-convergence report is an allowed outcome
    }
    EquilibriumCheck check =
        verify_equilibrium(game, eq.profile, 1e-3, brd.solver);
    os << name << ": rounds=" << eq.rounds
       << " max_slack=" << check.max_slack << "; ";
    if (!check.is_equilibrium) all_ok = false;
  }
  detail = os.str();
  return all_ok;
}

bool criterion_9(std::string& detail) {
  if (g_sweep7.points.empty()) {
    detail = "criterion 7 sweep unavailable";
    return false;
  }
  // Social solves that report Optimal carry gap <= 1e-6 relative.
  for (const auto& pt : g_sweep7.points) {
    if (!pt.both_optimal) continue;
    double total_eq = pt.mean_j_eq * pt.agents;
    double total_so = pt.mean_j_so * pt.agents;
    double gap_allow = 2.0 * 1e-6 * std::max(1.0, std::abs(total_eq));
    if (!(total_so <= total_eq + gap_allow)) {
      detail = pt.scenario + " lambda=" + std::to_string(pt.lambda) +
               ": social total exceeds equilibrium total";
      return false;
    }
  }
  detail = "social total <= equilibrium total on every converged pair";
  return true;
}

bool criterion_10(std::string& detail) {
  if (g_sweep7.csv.empty()) {
    detail = "criterion 7 sweep unavailable";
    return false;
  }
  SweepOutcome again = run_criterion7_sweeps();
  if (again.csv != g_sweep7.csv) {
    detail = "CSV outputs differ between identical runs";
    return false;
  }
  std::ostringstream os;
  os << "byte-identical CSV (" << g_sweep7.csv.size() << " bytes)";
  detail = os.str();
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run(1, "kinematic exactness", criterion_1);
  run(2, "MILP oracle equivalence", criterion_2);
  run(3, "Minkowski oracle", criterion_3);
  run(4, "chance-bound validity", criterion_4);
  run(5, "margin math roundtrip", criterion_5);
  run(6, "covariance propagation", criterion_6);
  run(7, "directional reproduction", criterion_7);
  run(8, "BRD behavior", criterion_8);
  run(9, "social-optimum dominance", criterion_9);
  run(10, "determinism", criterion_10);
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
