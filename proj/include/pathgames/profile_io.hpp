#pragma once

#include <iosfwd>
#include <string>

#include "pathgames/game.hpp"

namespace pathgames {

// A profile plus the context it was computed under, as saved to disk so
// `respond`, `simulate` and `render` can compose in pipelines.
struct ProfileDocument {
  std::string scenario_name;
  std::string mode;  // plan | respond | equilibrium | social
  double lambda = 0.5;
  int horizon = 12;
  double feedback_gain = 0.0;
  Profile profile;
};

std::string serialize_profile(const ProfileDocument& doc);
ProfileDocument parse_profile(const std::string& text);

void save_profile(const ProfileDocument& doc, const std::string& path);
ProfileDocument load_profile(const std::string& path);

}  // namespace pathgames
