#include "pathgames/sweep.hpp"

#include <charconv>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

namespace pathgames {

namespace {

// 9 significant digits, locale-independent.
std::string fmt9(double v) {
  char buf[40];
  auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

struct LambdaResult {
  std::vector<SweepRow> rows;
};

SweepRow base_row(const ScenarioFile& scenario, double lambda,
                  const std::string& mode, double gain) {
  SweepRow row;
  row.scenario = scenario.name;
  row.lambda = lambda;
  row.mode = mode;
  row.feedback_gain = gain;
  return row;
}

void emit_profile_rows(std::vector<SweepRow>& out, SweepRow prototype,
                       const GameSpec& game, const Profile& profile,
                       const RolloutReport& report, int rounds,
                       const std::string& status) {
  double mean_t = 0.0, mean_g = 0.0, mean_j = 0.0, mean_risk = 0.0;
  const double n = static_cast<double>(profile.plans.size());
  for (size_t i = 0; i < profile.plans.size(); ++i) {
    const Plan& p = profile.plans[i];
    SweepRow row = prototype;
    row.agent_id = std::to_string(game.agents[i].id);
    row.t_goal = p.time_term;
    row.g = p.safety_term;
    row.j = p.objective;
    row.risk_bound = p.risk_bound;
    auto hit = report.collisions_by_agent.find(game.agents[i].id);
    row.empirical_rate =
        hit == report.collisions_by_agent.end()
            ? 0.0
            : static_cast<double>(hit->second) /
                  static_cast<double>(report.trials);
    row.rounds = rounds;
    row.solver_status = status;
    mean_t += p.time_term / n;
    mean_g += p.safety_term / n;
    mean_j += p.objective / n;
    mean_risk += p.risk_bound / n;
    out.push_back(std::move(row));
  }
  SweepRow mean = prototype;
  mean.agent_id = "mean";
  mean.t_goal = mean_t;
  mean.g = mean_g;
  mean.j = mean_j;
  mean.risk_bound = mean_risk;
  mean.empirical_rate = report.collision_rate;
  mean.rounds = rounds;
  mean.solver_status = status;
  out.push_back(std::move(mean));
}

void emit_failure_rows(std::vector<SweepRow>& out, SweepRow prototype,
                       const std::string& status) {
  SweepRow row = std::move(prototype);
  row.agent_id = "mean";
  row.t_goal = row.g = row.j = row.risk_bound = row.empirical_rate =
      std::numeric_limits<double>::quiet_NaN();
  row.solver_status = status;
  out.push_back(std::move(row));
}

LambdaResult run_lambda_point(const ScenarioFile& scenario, double lambda,
                              const SweepOptions& options) {
  LambdaResult result;
  ScenarioOverrides overrides;
  overrides.lambda = lambda;
  overrides.horizon = options.horizon;
  overrides.feedback_gain = options.feedback_gain;
  overrides.legacy_margin = options.legacy_margin;
  GameSpec game = to_game_spec(scenario, overrides);
  const double gain = game.agents.front().feedback_gain;

  RolloutConfig rollout_cfg;
  rollout_cfg.trials = options.trials;
  rollout_cfg.seed = options.seed;

  EquilibriumResult eq;
  bool have_eq = false;
  {
    SweepRow prototype = base_row(scenario, lambda, "equilibrium", gain);
    try {
      BrdOptions brd;
      brd.max_rounds = options.max_rounds;
      brd.tol = options.brd_tol;
      brd.solver = options.solver;
      eq = best_response_dynamics(game, brd);
      have_eq = true;
      RolloutReport report = rollout(game, eq.profile, rollout_cfg);
      emit_profile_rows(result.rows, prototype, game, eq.profile, report,
                        eq.rounds,
                        eq.converged ? "converged" : "not-converged");
    } catch (const std::exception& e) {
      emit_failure_rows(result.rows, prototype, std::string("error: ") + e.what());
    }
  }
  {
    SweepRow prototype = base_row(scenario, lambda, "social", gain);
    try {
      SocialInfo info;
      Profile social = social_optimum(game, options.solver, &info,
                                      have_eq ? &eq.profile : nullptr);
      RolloutReport report = rollout(game, social, rollout_cfg);
      emit_profile_rows(result.rows, prototype, game, social, report, 0,
                        to_string(info.status));
    } catch (const std::exception& e) {
      emit_failure_rows(result.rows, prototype, std::string("error: ") + e.what());
    }
  }
  return result;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioFile& scenario,
                                const SweepOptions& options) {
  scenario.validate();
  const auto& grid = scenario.lambda_grid;
  std::vector<LambdaResult> results(grid.size());

  int jobs = options.jobs > 0
                 ? options.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));

  if (jobs == 1) {
    for (size_t k = 0; k < grid.size(); ++k) {
      results[k] = run_lambda_point(scenario, grid[k], options);
    }
  } else {
    std::vector<std::future<LambdaResult>> futures;
    futures.reserve(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) {
      futures.push_back(std::async(std::launch::async, [&, k] {
        return run_lambda_point(scenario, grid[k], options);
      }));
    }
    for (size_t k = 0; k < grid.size(); ++k) results[k] = futures[k].get();
  }

  std::vector<SweepRow> rows;
  for (const LambdaResult& r : results) {
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "scenario,lambda,mode,feedback_gain,agent_id,T_goal,G,J,risk_bound,"
        "empirical_rate,rounds,solver_status\n";
  for (const SweepRow& r : rows) {
    os << r.scenario << "," << fmt9(r.lambda) << "," << r.mode << ","
       << fmt9(r.feedback_gain) << "," << r.agent_id << "," << fmt9(r.t_goal)
       << "," << fmt9(r.g) << "," << fmt9(r.j) << "," << fmt9(r.risk_bound)
       << "," << fmt9(r.empirical_rate) << "," << r.rounds << ","
       << r.solver_status << "\n";
  }
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_sweep_csv(rows, os);
  return os.str();
}

}  // namespace pathgames
