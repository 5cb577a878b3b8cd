#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pathgames/game.hpp"

namespace pathgames {

struct ScenarioAgent {
  Vec2 start;
  Vec2 goal;
  Vec2 half_extent{7.5, 7.5};
  double vmax = 10.0;
  double sigma_scale = 1.9;  // isotropic noise covariance = sigma_scale * I
  double feedback_gain = 0.0;
};

struct ScenarioFile {
  std::string name;
  Vec2 workspace_min{0, 0};
  Vec2 workspace_max{100, 100};
  std::vector<ScenarioAgent> agents;
  PlanParams defaults;
  std::vector<double> lambda_grid{0.1, 0.2, 0.3, 0.4, 0.5,
                                  0.6, 0.7, 0.8, 0.9};

  void validate() const;  // throws ScenarioError with a description
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuiltinOptions {
  double feedback_gain = 0.0;
  // The printed opposing goal (5,10) is shipped as-is; this substitutes the
  // symmetric (5,50) variant.
  bool corrected_opposing = false;
};

const std::vector<std::string>& builtin_scenario_names();
ScenarioFile builtin_scenario(const std::string& name,
                              const BuiltinOptions& options = {});

// Line-oriented key/value text with nested agent blocks; grammar in
// docs/file-formats.md. Errors carry the offending line number.
ScenarioFile parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioFile& scenario);

// Load from a file path (I/O errors throw std::runtime_error).
ScenarioFile load_scenario(const std::string& path);

struct ScenarioOverrides {
  std::optional<double> lambda;
  std::optional<int> horizon;
  std::optional<double> feedback_gain;
  bool legacy_margin = false;
};

GameSpec to_game_spec(const ScenarioFile& scenario,
                      const ScenarioOverrides& overrides = {});

}  // namespace pathgames
