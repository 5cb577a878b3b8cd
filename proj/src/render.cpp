#include "pathgames/render.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pathgames {

namespace {

std::string fmt(double v) {
  char buf[40];
  auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void render_svg(const ScenarioFile& scenario, const Profile& profile,
                std::ostream& os) {
  if (profile.plans.empty()) {
    throw std::invalid_argument("cannot render an empty profile");
  }
  const Vec2 lo = scenario.workspace_min;
  const Vec2 hi = scenario.workspace_max;
  const double width = hi.x - lo.x;
  const double height = hi.y - lo.y;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(lo.x)
     << " " << fmt(lo.y) << " " << fmt(width) << " " << fmt(height) << "\">\n";
  // Flip the y axis so workspace coordinates read the usual way up.
  os << "<g transform=\"translate(0," << fmt(hi.y + lo.y)
     << ") scale(1,-1)\">\n";
  os << "<rect x=\"" << fmt(lo.x) << "\" y=\"" << fmt(lo.y) << "\" width=\""
     << fmt(width) << "\" height=\"" << fmt(height)
     << "\" fill=\"white\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";

  for (size_t i = 0; i < profile.plans.size(); ++i) {
    const Plan& plan = profile.plans[i];
    const std::string color =
        kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    Vec2 half =
        i < scenario.agents.size() ? scenario.agents[i].half_extent
                                   : Vec2{7.5, 7.5};
    const auto& traj = plan.expected_trajectory;
    const int last = plan.goal_step;

    // Body footprint at each step, fading with time.
    for (int t = 0; t <= last; ++t) {
      Vec2 c = traj[static_cast<size_t>(t)];
      double opacity = 0.08 + 0.5 * (1.0 - static_cast<double>(t) /
                                               std::max(1, last));
      os << "<rect x=\"" << fmt(c.x - half.x) << "\" y=\"" << fmt(c.y - half.y)
         << "\" width=\"" << fmt(2 * half.x) << "\" height=\""
         << fmt(2 * half.y) << "\" fill=\"" << color << "\" fill-opacity=\""
         << fmt(opacity) << "\" stroke=\"" << color
         << "\" stroke-width=\"0.2\"/>\n";
    }
    // Expected trajectory.
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"0.8\" points=\"";
    for (int t = 0; t <= last; ++t) {
      Vec2 c = traj[static_cast<size_t>(t)];
      if (t) os << " ";
      os << fmt(c.x) << "," << fmt(c.y);
    }
    os << "\"/>\n";
    // Goal marker.
    if (i < scenario.agents.size()) {
      Vec2 g = scenario.agents[i].goal;
      os << "<circle cx=\"" << fmt(g.x) << "\" cy=\"" << fmt(g.y)
         << "\" r=\"1.6\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"0.6\"/>\n";
      os << "<circle cx=\"" << fmt(g.x) << "\" cy=\"" << fmt(g.y)
         << "\" r=\"0.4\" fill=\"" << color << "\"/>\n";
    }
  }
  os << "</g>\n</svg>\n";
}

std::string render_svg_string(const ScenarioFile& scenario,
                              const Profile& profile) {
  std::ostringstream os;
  render_svg(scenario, profile, os);
  return os.str();
}

void render_svg_file(const ScenarioFile& scenario, const Profile& profile,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SVG file: " + path);
  render_svg(scenario, profile, out);
  if (!out) throw std::runtime_error("failed writing SVG file: " + path);
}

}  // namespace pathgames
