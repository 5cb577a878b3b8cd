#include "pathgames/game.hpp"

#include <chrono>
#include <cmath>

#include "doctest.h"

using namespace pathgames;

namespace {

AgentSpec paper_agent(int id, Vec2 start, Vec2 goal, double sigma = 1.9) {
  AgentSpec a;
  a.id = id;
  a.shape = AgentShape(box({0, 0}, {7.5, 7.5}));
  a.noise = NoiseModel::isotropic(sigma);
  a.control_bound = 10.0;
  a.start = start;
  a.goal = goal;
  return a;
}

GameSpec opposing_game(double lambda, int horizon = 12) {
  GameSpec g;
  g.agents = {paper_agent(0, {10, 50}, {95, 50}),
              paper_agent(1, {90, 50}, {5, 10})};
  g.params.horizon = horizon;
  g.params.lambda = lambda;
  return g;
}

}  // namespace

TEST_CASE("game validation") {
  GameSpec g;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = opposing_game(0.5);
  CHECK_NOTHROW(g.validate());
  g.agents[1].id = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = opposing_game(0.5);
  g.agents[1].start = g.agents[0].start;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("single-agent game converges immediately") {
  GameSpec g;
  g.agents = {paper_agent(0, {10, 50}, {95, 50})};
  g.params.lambda = 1.0;
  g.params.horizon = 12;
  EquilibriumResult eq = best_response_dynamics(g);
  CHECK(eq.converged);
  CHECK(eq.rounds == 1);
  CHECK(eq.profile.plans[0].goal_step == 9);

  Plan alone = solve_plan(g.agents[0], {}, g.params);
  CHECK(eq.profile.plans[0].objective == doctest::Approx(alone.objective));
}

TEST_CASE("distant agents do not interact") {
  GameSpec g;
  g.agents = {paper_agent(0, {10, 50}, {95, 50}),
              paper_agent(1, {5000, 5000}, {5085, 5000})};
  g.params.lambda = 0.5;
  g.params.horizon = 12;
  EquilibriumResult eq = best_response_dynamics(g);
  CHECK(eq.converged);
  CHECK(eq.rounds == 1);
  for (size_t i = 0; i < 2; ++i) {
    Plan alone = solve_plan(g.agents[i], {}, g.params);
    CHECK(eq.profile.plans[i].goal_step == alone.goal_step);
    // Margins against the far opponent all saturate.
    for (const MarginRecord& rec : eq.profile.plans[i].margins) {
      CHECK(rec.value == doctest::Approx(g.params.margin_cap));
    }
  }
}

TEST_CASE("opposing scenario: BRD converges and verifies") {
  GameSpec g = opposing_game(0.5);
  auto t0 = std::chrono::steady_clock::now();
  EquilibriumResult eq = best_response_dynamics(g, {.max_rounds = 20});
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  MESSAGE("opposing BRD: rounds=", eq.rounds, " time=", secs, "s");
  REQUIRE(eq.converged);
  CHECK(eq.rounds <= 20);
  CHECK(eq.epsilon <= 1e-6);

  // The agents must stay clear of each other in expectation.
  const Plan& p0 = eq.profile.plans[0];
  const Plan& p1 = eq.profile.plans[1];
  Polytope volume = collision_volume(g.agents[0].shape,
                                     g.agents[1].shape.relative_region());
  for (int t = 0; t < std::min(p0.goal_step, p1.goal_step); ++t) {
    Vec2 diff = p0.expected_trajectory[static_cast<size_t>(t)] -
                p1.expected_trajectory[static_cast<size_t>(t)];
    CHECK_FALSE(contains(volume, diff, -1e-9));
  }

  EquilibriumCheck check = verify_equilibrium(g, eq.profile, 1e-4);
  CHECK(check.is_equilibrium);
  CHECK(check.max_slack <= 1e-4);
}

TEST_CASE("re-solving never worsens the acting agent") {
  GameSpec g = opposing_game(0.4);
  // Manual two rounds of the dynamics, checking the monotone-step property
  // through plan re-evaluation against the current opponents.
  std::vector<Plan> plans;
  for (const AgentSpec& a : g.agents) plans.push_back(solve_plan(a, {}, g.params));
  for (int round = 0; round < 2; ++round) {
    for (size_t i = 0; i < g.agents.size(); ++i) {
      std::vector<std::pair<AgentSpec, Plan>> others;
      for (size_t j = 0; j < g.agents.size(); ++j) {
        if (j != i) others.emplace_back(g.agents[j], plans[j]);
      }
      double before = evaluate_plan(g.agents[i], plans[i], others, g.params);
      Plan response = solve_best_response(g.agents[i], others, g.params);
      CHECK(response.objective <= before + 1e-6);
      plans[i] = std::move(response);
    }
  }
}

TEST_CASE("BRD is deterministic") {
  GameSpec g = opposing_game(0.3);
  EquilibriumResult a = best_response_dynamics(g, {.max_rounds = 8});
  EquilibriumResult b = best_response_dynamics(g, {.max_rounds = 8});
  CHECK(a.rounds == b.rounds);
  CHECK(a.converged == b.converged);
  REQUIRE(a.profile.plans.size() == b.profile.plans.size());
  for (size_t i = 0; i < a.profile.plans.size(); ++i) {
    CHECK(a.profile.plans[i].objective == b.profile.plans[i].objective);
    CHECK(a.profile.plans[i].controls == b.profile.plans[i].controls);
  }
}

TEST_CASE("a detoured profile fails the equilibrium check") {
  GameSpec g;
  g.agents = {paper_agent(0, {10, 50}, {95, 50})};
  g.params.lambda = 1.0;
  g.params.horizon = 12;
  // A slower agent produces a valid but suboptimal plan for this game.
  AgentSpec slow = g.agents[0];
  slow.control_bound = 8.5;  // forces T = 10
  Profile detoured;
  detoured.plans.push_back(solve_plan(slow, {}, g.params));
  CHECK(detoured.plans[0].goal_step == 10);

  EquilibriumCheck check = verify_equilibrium(g, detoured, 1e-4);
  CHECK_FALSE(check.is_equilibrium);
  CHECK(check.max_slack == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("social optimum of a single agent equals its own plan") {
  GameSpec g;
  g.agents = {paper_agent(0, {10, 50}, {95, 50})};
  g.params.lambda = 0.5;
  g.params.horizon = 12;
  Profile social = social_optimum(g);
  Plan alone = solve_plan(g.agents[0], {}, g.params);
  CHECK(social.plans[0].objective == doctest::Approx(alone.objective));
  CHECK(social.plans[0].goal_step == alone.goal_step);
}

TEST_CASE("social optimum separates for non-interacting agents") {
  GameSpec g;
  g.agents = {paper_agent(0, {10, 50}, {95, 50}),
              paper_agent(1, {5000, 5000}, {5085, 5000})};
  g.params.lambda = 0.5;
  g.params.horizon = 12;
  SocialInfo info;
  Profile social = social_optimum(g, {}, &info);
  REQUIRE(info.status == SolveStatus::kOptimal);
  double separate = 0.0;
  for (const AgentSpec& a : g.agents) {
    // Margins vs the other agent saturate, contributing the cap per step.
    Plan alone = solve_plan(a, {}, g.params);
    separate += alone.objective;
  }
  // The joint objective additionally carries the saturated pair margins.
  double pair_bonus = -(1.0 - g.params.lambda) * g.params.margin_cap *
                      2.0 * (g.params.horizon + 1);
  CHECK(social.total_objective() ==
        doctest::Approx(separate + pair_bonus).epsilon(1e-6));
  CHECK(social.plans[0].goal_step == 9);
  CHECK(social.plans[1].goal_step == 9);
}

TEST_CASE("pair volume mirror identity") {
  AgentShape square(box({0, 0}, {7.5, 7.5}));
  AgentShape wide(box({-1, 0}, {3, 2}));
  Polytope k01 = collision_volume(square, wide.relative_region());
  Polytope k10 = collision_volume(wide, square.relative_region());
  CHECK(hausdorff_distance(k01, reflect(k10)) <= 1e-9);
}

TEST_CASE("social optimum dominates the equilibrium on the opposing game") {
  GameSpec g = opposing_game(0.5);
  EquilibriumResult eq = best_response_dynamics(g, {.max_rounds = 20});
  REQUIRE(eq.converged);
  SocialInfo info;
  auto t0 = std::chrono::steady_clock::now();
  Profile social = social_optimum(g, {}, &info, &eq.profile);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  MESSAGE("social solve: status=", std::string(to_string(info.status)),
          " nodes=", info.nodes_explored, " time=", secs, "s");
  REQUIRE((info.status == SolveStatus::kOptimal ||
           info.status == SolveStatus::kFeasible));
  CHECK(social.total_objective() <=
        eq.profile.total_objective() + 2.0 * std::max(info.gap, 1e-9) + 1e-6);

  OutcomeComparison cmp = compare_outcomes(eq, social);
  CHECK(cmp.mean_j_social <= cmp.mean_j_equilibrium + 1e-6);
}

TEST_CASE("compare_outcomes rejects mismatched games") {
  GameSpec g = opposing_game(0.5);
  EquilibriumResult eq;
  eq.profile.plans.resize(2);
  eq.profile.plans[0].agent_id = 0;
  eq.profile.plans[1].agent_id = 1;
  Profile social;
  social.plans.resize(1);
  CHECK_THROWS_AS(compare_outcomes(eq, social), std::invalid_argument);

  // Identical profiles give zero deltas.
  Profile same = eq.profile;
  OutcomeComparison cmp = compare_outcomes(eq, same);
  CHECK(cmp.mean_j_equilibrium == cmp.mean_j_social);
  CHECK(cmp.mean_t_equilibrium == cmp.mean_t_social);
  CHECK(cmp.mean_g_equilibrium == cmp.mean_g_social);
}
