#include "pathgames/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pathgames {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void fail_line(int line, const std::string& message) {
  throw ScenarioError("line " + std::to_string(line) + ": " + message);
}

struct Cursor {
  std::istringstream stream;
  int line = 0;
  std::string current;

  bool next() {
    while (std::getline(stream, current)) {
      ++line;
      // Strip comments and whitespace.
      auto hash = current.find('#');
      if (hash != std::string::npos) current.erase(hash);
      auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
      while (!current.empty() && is_space(current.back())) current.pop_back();
      size_t begin = 0;
      while (begin < current.size() && is_space(current[begin])) ++begin;
      current.erase(0, begin);
      if (!current.empty()) return true;
    }
    return false;
  }
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, int line) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) fail_line(line, "bad number '" + tok + "'");
    return v;
  } catch (const ScenarioError&) {
    throw;
  } catch (...) {
    fail_line(line, "bad number '" + tok + "'");
  }
}

}  // namespace

void ScenarioFile::validate() const {
  if (name.empty()) throw ScenarioError("scenario has no name");
  if (!(workspace_min.x < workspace_max.x &&
        workspace_min.y < workspace_max.y)) {
    throw ScenarioError("workspace must have positive area");
  }
  if (agents.empty()) throw ScenarioError("scenario has no agents");
  auto inside = [&](Vec2 p) {
    return p.x >= workspace_min.x && p.x <= workspace_max.x &&
           p.y >= workspace_min.y && p.y <= workspace_max.y;
  };
  for (size_t i = 0; i < agents.size(); ++i) {
    const ScenarioAgent& a = agents[i];
    if (!inside(a.start)) {
      throw ScenarioError("agent " + std::to_string(i) +
                          ": start lies outside the workspace");
    }
    if (!inside(a.goal)) {
      throw ScenarioError("agent " + std::to_string(i) +
                          ": goal lies outside the workspace");
    }
    if (!(a.half_extent.x > 0 && a.half_extent.y > 0)) {
      throw ScenarioError("agent " + std::to_string(i) +
                          ": half_extent must be positive");
    }
    if (!(a.vmax > 0)) {
      throw ScenarioError("agent " + std::to_string(i) +
                          ": vmax must be positive");
    }
    if (a.sigma_scale < 0) {
      throw ScenarioError("agent " + std::to_string(i) +
                          ": sigma must be nonnegative");
    }
  }
  if (lambda_grid.empty()) throw ScenarioError("lambda_grid is empty");
  for (size_t k = 0; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] >= 0.0 && lambda_grid[k] <= 1.0)) {
      throw ScenarioError("lambda_grid entry " + fmt(lambda_grid[k]) +
                          " outside [0,1]");
    }
    if (k > 0 && lambda_grid[k] <= lambda_grid[k - 1]) {
      throw ScenarioError("lambda_grid must be strictly ascending");
    }
  }
  defaults.validate();
}

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names{"opposing", "parallel",
                                              "intersection2", "intersection3"};
  return names;
}

ScenarioFile builtin_scenario(const std::string& name,
                              const BuiltinOptions& options) {
  ScenarioFile s;
  s.name = name;
  auto agent = [&](Vec2 start, Vec2 goal) {
    ScenarioAgent a;
    a.start = start;
    a.goal = goal;
    a.feedback_gain = options.feedback_gain;
    return a;
  };
  if (name == "opposing") {
    Vec2 second_goal =
        options.corrected_opposing ? Vec2{5, 50} : Vec2{5, 10};
    s.agents = {agent({10, 50}, {95, 50}), agent({90, 50}, second_goal)};
  } else if (name == "parallel") {
    s.agents = {agent({10, 70}, {95, 70}), agent({10, 35}, {95, 35})};
  } else if (name == "intersection2") {
    s.agents = {agent({10, 50}, {90, 50}), agent({50, 10}, {50, 90})};
  } else if (name == "intersection3") {
    s.agents = {agent({50, 90}, {50, 5}), agent({85, 30}, {11, 73}),
                agent({14, 29}, {90, 73})};
  } else {
    std::string known;
    for (const std::string& n : builtin_scenario_names()) {
      known += known.empty() ? n : ", " + n;
    }
    throw ScenarioError("unknown scenario '" + name + "' (builtins: " + known +
                        ")");
  }
  s.validate();
  return s;
}

ScenarioFile parse_scenario(const std::string& text) {
  Cursor cur;
  cur.stream.str(text);
  ScenarioFile s;
  s.lambda_grid.clear();
  bool saw_version = false;
  bool saw_name = false;

  while (cur.next()) {
    std::vector<std::string> tok = split(cur.current);
    const std::string& key = tok[0];
    auto need = [&](size_t count) {
      if (tok.size() != count + 1) {
        fail_line(cur.line, "'" + key + "' expects " + std::to_string(count) +
                                " value(s)");
      }
    };
    if (key == "format_version") {
      need(1);
      if (tok[1] != "1") fail_line(cur.line, "unsupported format_version");
      saw_version = true;
    } else if (key == "name") {
      need(1);
      s.name = tok[1];
      saw_name = true;
    } else if (key == "workspace") {
      need(4);
      s.workspace_min = {parse_number(tok[1], cur.line),
                         parse_number(tok[2], cur.line)};
      s.workspace_max = {parse_number(tok[3], cur.line),
                         parse_number(tok[4], cur.line)};
    } else if (key == "horizon") {
      need(1);
      s.defaults.horizon = static_cast<int>(parse_number(tok[1], cur.line));
    } else if (key == "lambda") {
      need(1);
      s.defaults.lambda = parse_number(tok[1], cur.line);
      if (s.defaults.lambda < 0.0 || s.defaults.lambda > 1.0) {
        fail_line(cur.line, "lambda outside [0,1]");
      }
    } else if (key == "big_m") {
      need(1);
      s.defaults.big_m = parse_number(tok[1], cur.line);
    } else if (key == "margin_cap") {
      need(1);
      s.defaults.margin_cap = parse_number(tok[1], cur.line);
    } else if (key == "goal_tolerance") {
      need(1);
      s.defaults.goal_tolerance = parse_number(tok[1], cur.line);
    } else if (key == "lambda_grid") {
      if (tok.size() < 2) fail_line(cur.line, "lambda_grid needs values");
      for (size_t k = 1; k < tok.size(); ++k) {
        double v = parse_number(tok[k], cur.line);
        if (v < 0.0 || v > 1.0) {
          fail_line(cur.line, "lambda_grid value " + tok[k] + " outside [0,1]");
        }
        s.lambda_grid.push_back(v);
      }
    } else if (key == "agent") {
      need(0);
      ScenarioAgent a;
      bool saw_start = false, saw_goal = false, closed = false;
      while (cur.next()) {
        std::vector<std::string> at = split(cur.current);
        const std::string& akey = at[0];
        auto aneed = [&](size_t count) {
          if (at.size() != count + 1) {
            fail_line(cur.line, "'" + akey + "' expects " +
                                    std::to_string(count) + " value(s)");
          }
        };
        if (akey == "end") {
          closed = true;
          break;
        } else if (akey == "start") {
          aneed(2);
          a.start = {parse_number(at[1], cur.line),
                     parse_number(at[2], cur.line)};
          saw_start = true;
        } else if (akey == "goal") {
          aneed(2);
          a.goal = {parse_number(at[1], cur.line),
                    parse_number(at[2], cur.line)};
          saw_goal = true;
        } else if (akey == "half_extent") {
          aneed(2);
          a.half_extent = {parse_number(at[1], cur.line),
                           parse_number(at[2], cur.line)};
        } else if (akey == "vmax") {
          aneed(1);
          a.vmax = parse_number(at[1], cur.line);
        } else if (akey == "sigma") {
          aneed(1);
          a.sigma_scale = parse_number(at[1], cur.line);
        } else if (akey == "feedback_gain") {
          aneed(1);
          a.feedback_gain = parse_number(at[1], cur.line);
        } else {
          fail_line(cur.line, "unknown agent field '" + akey + "'");
        }
      }
      if (!closed) fail_line(cur.line, "agent block not closed with 'end'");
      if (!saw_start) fail_line(cur.line, "agent block missing 'start'");
      if (!saw_goal) fail_line(cur.line, "agent block missing 'goal'");
      s.agents.push_back(a);
    } else {
      fail_line(cur.line, "unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw ScenarioError("missing format_version");
  if (!saw_name) throw ScenarioError("missing name");
  if (s.lambda_grid.empty()) {
    s.lambda_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  }
  s.validate();
  return s;
}

std::string serialize_scenario(const ScenarioFile& s) {
  std::ostringstream os;
  os << "format_version 1\n";
  os << "name " << s.name << "\n";
  os << "workspace " << fmt(s.workspace_min.x) << " " << fmt(s.workspace_min.y)
     << " " << fmt(s.workspace_max.x) << " " << fmt(s.workspace_max.y) << "\n";
  os << "horizon " << s.defaults.horizon << "\n";
  os << "lambda " << fmt(s.defaults.lambda) << "\n";
  os << "big_m " << fmt(s.defaults.big_m) << "\n";
  os << "margin_cap " << fmt(s.defaults.margin_cap) << "\n";
  os << "goal_tolerance " << fmt(s.defaults.goal_tolerance) << "\n";
  os << "lambda_grid";
  for (double v : s.lambda_grid) os << " " << fmt(v);
  os << "\n";
  for (const ScenarioAgent& a : s.agents) {
    os << "agent\n";
    os << "  start " << fmt(a.start.x) << " " << fmt(a.start.y) << "\n";
    os << "  goal " << fmt(a.goal.x) << " " << fmt(a.goal.y) << "\n";
    os << "  half_extent " << fmt(a.half_extent.x) << " "
       << fmt(a.half_extent.y) << "\n";
    os << "  vmax " << fmt(a.vmax) << "\n";
    os << "  sigma " << fmt(a.sigma_scale) << "\n";
    os << "  feedback_gain " << fmt(a.feedback_gain) << "\n";
    os << "end\n";
  }
  return os.str();
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

GameSpec to_game_spec(const ScenarioFile& scenario,
                      const ScenarioOverrides& overrides) {
  scenario.validate();
  GameSpec game;
  game.params = scenario.defaults;
  if (overrides.lambda) game.params.lambda = *overrides.lambda;
  if (overrides.horizon) game.params.horizon = *overrides.horizon;
  game.params.legacy_margin = overrides.legacy_margin;
  int id = 0;
  for (const ScenarioAgent& sa : scenario.agents) {
    AgentSpec a;
    a.id = id++;
    a.shape = AgentShape(box({0, 0}, sa.half_extent));
    a.noise = NoiseModel::isotropic(sa.sigma_scale);
    a.control_bound = sa.vmax;
    a.start = sa.start;
    a.goal = sa.goal;
    a.feedback_gain = overrides.feedback_gain.value_or(sa.feedback_gain);
    game.agents.push_back(std::move(a));
  }
  game.validate();
  return game;
}

}  // namespace pathgames
