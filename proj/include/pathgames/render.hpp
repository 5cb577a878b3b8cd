#pragma once

#include <iosfwd>
#include <string>

#include "pathgames/profile_io.hpp"
#include "pathgames/scenario.hpp"

namespace pathgames {

// SVG snapshot of a profile: workspace frame, goal markers, expected
// trajectories, and the agent bodies at each step faded by time. One SVG
// unit equals one workspace unit; output bytes are deterministic.
void render_svg(const ScenarioFile& scenario, const Profile& profile,
                std::ostream& os);

std::string render_svg_string(const ScenarioFile& scenario,
                              const Profile& profile);

void render_svg_file(const ScenarioFile& scenario, const Profile& profile,
                     const std::string& path);

}  // namespace pathgames
