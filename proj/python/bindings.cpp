#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

#include "pathgames/game.hpp"
#include "pathgames/montecarlo.hpp"
#include "pathgames/planner.hpp"
#include "pathgames/render.hpp"
#include "pathgames/scenario.hpp"
#include "pathgames/stochastic.hpp"
#include "pathgames/sweep.hpp"

namespace py = pybind11;
using namespace pathgames;

namespace {

using XY = std::pair<double, double>;

Vec2 to_vec(const XY& p) { return {p.first, p.second}; }
XY from_vec(Vec2 v) { return {v.x, v.y}; }

std::vector<XY> from_vecs(const std::vector<Vec2>& vs) {
  std::vector<XY> out;
  out.reserve(vs.size());
  for (Vec2 v : vs) out.push_back(from_vec(v));
  return out;
}

Mat2 to_mat(const std::vector<double>& m) {
  if (m.size() != 4) {
    throw std::invalid_argument("covariance must be [a, b, c, d] row-major");
  }
  return {m[0], m[1], m[2], m[3]};
}

GameSpec game_from(const ScenarioFile& scenario, std::optional<double> lambda,
                   std::optional<int> horizon,
                   std::optional<double> feedback_gain) {
  ScenarioOverrides ov;
  ov.lambda = lambda;
  ov.horizon = horizon;
  ov.feedback_gain = feedback_gain;
  return to_game_spec(scenario, ov);
}

std::vector<Polytope> boxes_from(
    const std::vector<std::tuple<double, double, double, double>>& specs) {
  std::vector<Polytope> out;
  for (const auto& [cx, cy, hx, hy] : specs) {
    out.push_back(box({cx, cy}, {hx, hy}));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(pathgames, m) {
  m.doc() =
      "Chance-constrained path planning games: single plans, best "
      "responses, equilibria, social optima, and rollout validation.";

  // ---- numeric primitives ----
  m.def("erf", [](double x) { return pathgames::erf(x); }, py::arg("x"));
  m.def("erf_inv", [](double y) { return pathgames::erf_inv(y); },
        py::arg("y"));
  m.def("risk_from_margin", &risk_from_margin, py::arg("s"));
  m.def(
      "margin_coefficient",
      [](const XY& normal, const std::vector<double>& cov, bool root_two) {
        return margin_coefficient(to_vec(normal), to_mat(cov), root_two);
      },
      py::arg("normal"), py::arg("cov"), py::arg("root_two") = true);
  m.def(
      "propagate_covariance",
      [](const std::vector<double>& a_cl, const std::vector<double>& sigma,
         int horizon) {
        CovarianceSchedule s =
            propagate_covariance(to_mat(a_cl), NoiseModel(to_mat(sigma)),
                                 horizon);
        std::vector<std::vector<double>> out;
        for (const Mat2& c : s.per_step) out.push_back({c.a, c.b, c.c, c.d});
        return out;
      },
      py::arg("a_cl"), py::arg("sigma"), py::arg("horizon"));

  // ---- geometry ----
  m.def(
      "collision_volume",
      [](const std::vector<XY>& agent, const std::vector<XY>& obstacle) {
        std::vector<Vec2> av, ov;
        for (const XY& p : agent) av.push_back(to_vec(p));
        for (const XY& p : obstacle) ov.push_back(to_vec(p));
        AgentShape shape(Polytope::from_points(av));
        Polytope k = collision_volume(shape, Polytope::from_points(ov));
        return from_vecs(k.vertices());
      },
      py::arg("agent_vertices"), py::arg("obstacle_vertices"),
      "Vertices of the reference positions that overlap the obstacle.");
  m.def(
      "polygon_contains",
      [](const std::vector<XY>& vertices, const XY& point) {
        std::vector<Vec2> vs;
        for (const XY& p : vertices) vs.push_back(to_vec(p));
        return contains(Polytope::from_points(vs), to_vec(point));
      },
      py::arg("vertices"), py::arg("point"));

  // ---- scenarios ----
  py::class_<ScenarioAgent>(m, "ScenarioAgent")
      .def_property_readonly("start",
                             [](const ScenarioAgent& a) { return from_vec(a.start); })
      .def_property_readonly("goal",
                             [](const ScenarioAgent& a) { return from_vec(a.goal); })
      .def_readonly("vmax", &ScenarioAgent::vmax)
      .def_readonly("sigma_scale", &ScenarioAgent::sigma_scale)
      .def_readonly("feedback_gain", &ScenarioAgent::feedback_gain);

  py::class_<ScenarioFile>(m, "Scenario")
      .def_readonly("name", &ScenarioFile::name)
      .def_readonly("agents", &ScenarioFile::agents)
      .def_readonly("lambda_grid", &ScenarioFile::lambda_grid)
      .def("serialize", &serialize_scenario)
      .def("__repr__", [](const ScenarioFile& s) {
        return "<Scenario '" + s.name + "' with " +
               std::to_string(s.agents.size()) + " agents>";
      });

  m.def("scenario_names", [] { return builtin_scenario_names(); });
  m.def(
      "builtin_scenario",
      [](const std::string& name, double feedback_gain,
         bool corrected_opposing) {
        BuiltinOptions opt;
        opt.feedback_gain = feedback_gain;
        opt.corrected_opposing = corrected_opposing;
        return builtin_scenario(name, opt);
      },
      py::arg("name"), py::arg("feedback_gain") = 0.0,
      py::arg("corrected_opposing") = false);
  m.def("parse_scenario", &parse_scenario, py::arg("text"));

  // ---- plans and profiles ----
  py::class_<Plan>(m, "Plan")
      .def_readonly("agent_id", &Plan::agent_id)
      .def_readonly("goal_step", &Plan::goal_step)
      .def_readonly("objective", &Plan::objective)
      .def_readonly("safety_term", &Plan::safety_term)
      .def_readonly("time_term", &Plan::time_term)
      .def_readonly("risk_bound", &Plan::risk_bound)
      .def_property_readonly(
          "controls", [](const Plan& p) { return from_vecs(p.controls); })
      .def_property_readonly("trajectory", [](const Plan& p) {
        return from_vecs(p.expected_trajectory);
      });

  py::class_<Profile>(m, "Profile")
      .def_readonly("plans", &Profile::plans)
      .def("total_objective", &Profile::total_objective)
      .def("total_risk_bound", &Profile::total_risk_bound);

  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_readonly("profile", &EquilibriumResult::profile)
      .def_readonly("rounds", &EquilibriumResult::rounds)
      .def_readonly("converged", &EquilibriumResult::converged)
      .def_readonly("history", &EquilibriumResult::history)
      .def_readonly("epsilon", &EquilibriumResult::epsilon);

  py::class_<RolloutReport>(m, "RolloutReport")
      .def_readonly("trials", &RolloutReport::trials)
      .def_readonly("collision_rate", &RolloutReport::collision_rate)
      .def_readonly("confidence_halfwidth",
                    &RolloutReport::confidence_halfwidth)
      .def_readonly("goal_reach_rate", &RolloutReport::goal_reach_rate)
      .def_readonly("mean_goal_step", &RolloutReport::mean_goal_step);

  // ---- operations ----
  m.def(
      "plan_single",
      [](const ScenarioFile& scenario, int agent_index,
         std::optional<double> lambda, std::optional<int> horizon,
         std::optional<double> feedback_gain,
         const std::vector<std::tuple<double, double, double, double>>&
             obstacles) {
        GameSpec game = game_from(scenario, lambda, horizon, feedback_gain);
        if (agent_index < 0 ||
            agent_index >= static_cast<int>(game.agents.size())) {
          throw std::invalid_argument("agent index out of range");
        }
        py::gil_scoped_release release;
        return solve_plan(game.agents[static_cast<size_t>(agent_index)],
                          boxes_from(obstacles), game.params);
      },
      py::arg("scenario"), py::arg("agent") = 0, py::arg("lam") = py::none(),
      py::arg("horizon") = py::none(), py::arg("feedback_gain") = py::none(),
      py::arg("obstacles") =
          std::vector<std::tuple<double, double, double, double>>{});

  m.def(
      "best_response_dynamics",
      [](const ScenarioFile& scenario, std::optional<double> lambda,
         std::optional<int> horizon, std::optional<double> feedback_gain,
         int max_rounds) {
        GameSpec game = game_from(scenario, lambda, horizon, feedback_gain);
        BrdOptions opt;
        opt.max_rounds = max_rounds;
        py::gil_scoped_release release;
        return best_response_dynamics(game, opt);
      },
      py::arg("scenario"), py::arg("lam") = py::none(),
      py::arg("horizon") = py::none(), py::arg("feedback_gain") = py::none(),
      py::arg("max_rounds") = 50);

  m.def(
      "social_optimum",
      [](const ScenarioFile& scenario, std::optional<double> lambda,
         std::optional<int> horizon, std::optional<double> feedback_gain) {
        GameSpec game = game_from(scenario, lambda, horizon, feedback_gain);
        py::gil_scoped_release release;
        return social_optimum(game);
      },
      py::arg("scenario"), py::arg("lam") = py::none(),
      py::arg("horizon") = py::none(), py::arg("feedback_gain") = py::none());

  m.def(
      "rollout",
      [](const ScenarioFile& scenario, const Profile& profile,
         std::optional<double> lambda, std::optional<int> horizon,
         std::optional<double> feedback_gain, long trials,
         std::uint64_t seed) {
        GameSpec game = game_from(scenario, lambda, horizon, feedback_gain);
        RolloutConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return rollout(game, profile, cfg);
      },
      py::arg("scenario"), py::arg("profile"), py::arg("lam") = py::none(),
      py::arg("horizon") = py::none(), py::arg("feedback_gain") = py::none(),
      py::arg("trials") = 1000, py::arg("seed") = 0);

  m.def(
      "validate_bound",
      [](const RolloutReport& report, const Profile& profile) {
        return validate_bound(report, profile);
      },
      py::arg("report"), py::arg("profile"));

  m.def(
      "run_sweep_csv",
      [](const ScenarioFile& scenario, std::optional<int> horizon,
         std::optional<double> feedback_gain, long trials, std::uint64_t seed,
         int max_rounds, int jobs) {
        SweepOptions opt;
        opt.horizon = horizon;
        opt.feedback_gain = feedback_gain;
        opt.trials = trials;
        opt.seed = seed;
        opt.max_rounds = max_rounds;
        opt.jobs = jobs;
        py::gil_scoped_release release;
        return sweep_csv(run_sweep(scenario, opt));
      },
      py::arg("scenario"), py::arg("horizon") = py::none(),
      py::arg("feedback_gain") = py::none(), py::arg("trials") = 500,
      py::arg("seed") = 0, py::arg("max_rounds") = 20, py::arg("jobs") = 0);

  m.def(
      "render_svg",
      [](const ScenarioFile& scenario, const Profile& profile) {
        return render_svg_string(scenario, profile);
      },
      py::arg("scenario"), py::arg("profile"));

  py::register_exception<NoPlanError>(m, "NoPlanError");
  py::register_exception<InfeasibleSetupError>(m, "InfeasibleSetupError");
  py::register_exception<ScenarioError>(m, "ScenarioError");
}
