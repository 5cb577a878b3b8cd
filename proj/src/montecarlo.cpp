#include "pathgames/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace pathgames {

namespace {

// splitmix64: the counter-based generator behind every noise draw, keyed on
// (seed, trial, agent, step) so trials are order-independent.
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t key_of(std::uint64_t seed, long trial, int agent, int step) {
  std::uint64_t k = seed;
  k = splitmix(k ^ (0x100000001b3ULL * static_cast<std::uint64_t>(trial + 1)));
  k = splitmix(k ^ (0x9e3779b9ULL * static_cast<std::uint64_t>(agent + 1)));
  k = splitmix(k ^ static_cast<std::uint64_t>(step + 1));
  return k;
}

double to_unit(std::uint64_t bits) {
  // Top 53 bits to (0,1]; never returns 0 so log() stays finite.
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// One 2D standard normal via Box-Muller.
Vec2 standard_normal(std::uint64_t key) {
  double u1 = to_unit(splitmix(key));
  double u2 = to_unit(splitmix(key ^ 0xda442d24ULL));
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double clamp(double v, double bound) {
  return std::min(bound, std::max(-bound, v));
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RolloutReport rollout(const GameSpec& game, const Profile& profile,
                      const RolloutConfig& config,
                      const std::vector<Polytope>& obstacles) {
  game.validate();
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (profile.plans.size() != game.agents.size()) {
    throw std::invalid_argument("profile does not match the game");
  }
  const size_t n = game.agents.size();
  const int horizon = game.params.horizon;

  // Precomputed geometry: pair volumes (origin-relative) and noise factors.
  std::vector<std::vector<Polytope>> pair_volume(n, std::vector<Polytope>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j) {
        pair_volume[i][j] = collision_volume(
            game.agents[i].shape, game.agents[j].shape.relative_region());
      }
    }
  }
  std::vector<std::vector<Polytope>> obstacle_volume(n);
  for (size_t i = 0; i < n; ++i) {
    for (const Polytope& obs : obstacles) {
      obstacle_volume[i].push_back(collision_volume(game.agents[i].shape, obs));
    }
  }
  std::vector<Mat2> noise_factor;
  for (const AgentSpec& a : game.agents) {
    noise_factor.push_back(a.noise.cholesky_factor());
  }

  RolloutReport report;
  report.trials = config.trials;
  long trials_with_collision = 0;
  long reached = 0;
  double goal_step_sum = 0.0;

  std::vector<std::vector<Vec2>> states(n);
  for (long trial = 0; trial < config.trials; ++trial) {
    // Sample every agent's trajectory up to its retirement step.
    for (size_t i = 0; i < n; ++i) {
      const AgentSpec& agent = game.agents[i];
      const Plan& plan = profile.plans[i];
      auto& xs = states[i];
      xs.assign(1, agent.start);
      for (int t = 0; t < plan.goal_step; ++t) {
        Vec2 planned = plan.expected_trajectory[static_cast<size_t>(t)];
        Vec2 nominal = plan.controls[static_cast<size_t>(t)];
        Vec2 error = planned - xs.back();
        Vec2 u{clamp(nominal.x + agent.feedback_gain * error.x,
                     agent.control_bound),
               clamp(nominal.y + agent.feedback_gain * error.y,
                     agent.control_bound)};
        Vec2 w = noise_factor[i] *
                 standard_normal(key_of(config.seed, trial,
                                        agent.id, t));
        xs.push_back(agent.A * xs.back() + agent.B * u + w);
      }
    }

    bool collided = false;
    std::map<CollisionPair, bool> hit_this_trial;
    for (int t = 0; t <= horizon; ++t) {
      for (size_t i = 0; i < n; ++i) {
        if (t >= profile.plans[i].goal_step) continue;  // retired
        Vec2 xi = states[i][static_cast<size_t>(t)];
        for (size_t j = i + 1; j < n; ++j) {
          if (t >= profile.plans[j].goal_step) continue;
          Vec2 diff = xi - states[j][static_cast<size_t>(t)];
          if (contains(pair_volume[i][j], diff, -1e-9)) {
            collided = true;
            hit_this_trial[{game.agents[i].id, game.agents[j].id}] = true;
          }
        }
        for (size_t o = 0; o < obstacle_volume[i].size(); ++o) {
          if (contains(obstacle_volume[i][o], xi, -1e-9)) {
            collided = true;
            hit_this_trial[{game.agents[i].id, -(static_cast<int>(o) + 1)}] =
                true;
          }
        }
      }
    }
    if (collided) ++trials_with_collision;
    std::map<int, bool> agent_hit;
    for (const auto& [pair, hit] : hit_this_trial) {
      if (!hit) continue;
      ++report.collisions_by_pair[pair];
      agent_hit[pair.first] = true;
      if (pair.second >= 0) agent_hit[pair.second] = true;
    }
    for (const auto& [agent_id, hit] : agent_hit) {
      if (hit) ++report.collisions_by_agent[agent_id];
    }

    for (size_t i = 0; i < n; ++i) {
      const Plan& plan = profile.plans[i];
      const auto& xs = states[i];
      for (size_t t = 0; t < xs.size(); ++t) {
        if ((xs[t] - game.agents[i].goal).norm() <= config.capture_radius) {
          ++reached;
          goal_step_sum += static_cast<double>(t);
          break;
        }
      }
      (void)plan;
    }

    if (config.record_trajectories) {
      report.trajectories.push_back(states);
    }
  }

  double p = static_cast<double>(trials_with_collision) /
             static_cast<double>(config.trials);
  report.collision_rate = p;
  report.confidence_halfwidth =
      1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(config.trials));
  long agent_trials = config.trials * static_cast<long>(n);
  report.goal_reach_rate =
      static_cast<double>(reached) / static_cast<double>(agent_trials);
  report.mean_goal_step = reached > 0 ? goal_step_sum / reached : 0.0;
  return report;
}

bool validate_bound(const RolloutReport& report, const Profile& profile) {
  double bound = std::min(1.0, profile.total_risk_bound());
  return report.collision_rate <= bound + 3.0 * report.confidence_halfwidth;
}

void write_trajectories_csv(const RolloutReport& report, std::ostream& os) {
  os << "trial,agent,t,x,y\n";
  for (size_t trial = 0; trial < report.trajectories.size(); ++trial) {
    const auto& agents = report.trajectories[trial];
    for (size_t i = 0; i < agents.size(); ++i) {
      for (size_t t = 0; t < agents[i].size(); ++t) {
        os << trial << "," << i << "," << t << ","
           << format_double(agents[i][t].x) << ","
           << format_double(agents[i][t].y) << "\n";
      }
    }
  }
}

}  // namespace pathgames
