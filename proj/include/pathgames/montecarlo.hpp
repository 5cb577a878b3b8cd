#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pathgames/game.hpp"

namespace pathgames {

struct RolloutConfig {
  long trials = 1000;
  std::uint64_t seed = 0;
  bool record_trajectories = false;
  // An agent counts as having reached its goal once within this Euclidean
  // radius (default: half the paper-scenario body side, so the goal point
  // lies inside the body).
  double capture_radius = 7.5;
};

// Pair key: second >= 0 is an agent id, second = -(n+1) is obstacle n.
using CollisionPair = std::pair<int, int>;

struct RolloutReport {
  long trials = 0;
  double collision_rate = 0.0;
  double confidence_halfwidth = 0.0;  // 95% normal approximation
  std::map<CollisionPair, long> collisions_by_pair;  // trials with a hit
  std::map<int, long> collisions_by_agent;           // trials with a hit
  double goal_reach_rate = 0.0;
  double mean_goal_step = 0.0;  // over reached (trial, agent) pairs
  // Nonempty only with record_trajectories: [trial][agent][t].
  std::vector<std::vector<std::vector<Vec2>>> trajectories;
};

// Samples the closed-loop dynamics of every plan in the profile. Controls
// are the nominal sequence plus gain*(planned - observed), clamped to the
// control bounds. An agent is retired (no collision checks, held in place)
// from its plan's goal step onward. Identical seed and config reproduce the
// report bit for bit.
RolloutReport rollout(const GameSpec& game, const Profile& profile,
                      const RolloutConfig& config,
                      const std::vector<Polytope>& obstacles = {});

// Empirical rate must not exceed the profile's union bound plus three
// confidence half-widths; a failure indicates an encoding or margin defect.
bool validate_bound(const RolloutReport& report, const Profile& profile);

// CSV dump (trial, agent, t, x, y) of recorded trajectories.
void write_trajectories_csv(const RolloutReport& report, std::ostream& os);

}  // namespace pathgames
