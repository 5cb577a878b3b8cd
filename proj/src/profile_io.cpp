#include "pathgames/profile_io.hpp"

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

[[noreturn]] void fail(int line, const std::string& message) {
  throw std::runtime_error("profile line " + std::to_string(line) + ": " +
                           message);
}

}  // namespace

std::string serialize_profile(const ProfileDocument& doc) {
  std::ostringstream os;
  os << "format_version 1\n";
  os << "scenario " << doc.scenario_name << "\n";
  os << "mode " << doc.mode << "\n";
  os << "lambda " << fmt(doc.lambda) << "\n";
  os << "horizon " << doc.horizon << "\n";
  os << "feedback_gain " << fmt(doc.feedback_gain) << "\n";
  for (const Plan& p : doc.profile.plans) {
    os << "plan\n";
    os << "  agent " << p.agent_id << "\n";
    os << "  goal_step " << p.goal_step << "\n";
    os << "  objective " << fmt(p.objective) << "\n";
    os << "  safety_term " << fmt(p.safety_term) << "\n";
    os << "  time_term " << fmt(p.time_term) << "\n";
    os << "  risk_bound " << fmt(p.risk_bound) << "\n";
    os << "  controls";
    for (Vec2 u : p.controls) os << " " << fmt(u.x) << " " << fmt(u.y);
    os << "\n  trajectory";
    for (Vec2 r : p.expected_trajectory) os << " " << fmt(r.x) << " " << fmt(r.y);
    os << "\n  indicators";
    for (int d : p.goal_indicators) os << " " << d;
    os << "\n";
    for (const MarginRecord& m : p.margins) {
      os << "  margin " << m.constraint_id << " " << m.other_agent << " "
         << m.step << " " << fmt(m.value) << " " << m.selected_face << " "
         << (m.counted ? 1 : 0) << "\n";
    }
    os << "end\n";
  }
  return os.str();
}

ProfileDocument parse_profile(const std::string& text) {
  std::istringstream is(text);
  ProfileDocument doc;
  std::string line;
  int lineno = 0;
  Plan* plan = nullptr;
  Plan pending;
  bool saw_version = false;

  auto tokens = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ts(s);
    std::string tok;
    while (ts >> tok) out.push_back(tok);
    return out;
  };
  auto num = [&](const std::string& tok) {
    try {
      return std::stod(tok);
    } catch (...) {
      fail(lineno, "bad number '" + tok + "'");
    }
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::vector<std::string> tok = tokens(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "format_version") {
      if (tok.size() != 2 || tok[1] != "1") fail(lineno, "unsupported version");
      saw_version = true;
    } else if (key == "scenario") {
      doc.scenario_name = tok.size() > 1 ? tok[1] : "";
    } else if (key == "mode") {
      doc.mode = tok.size() > 1 ? tok[1] : "";
    } else if (key == "lambda") {
      doc.lambda = num(tok.at(1));
    } else if (key == "horizon") {
      doc.horizon = static_cast<int>(num(tok.at(1)));
    } else if (key == "feedback_gain") {
      doc.feedback_gain = num(tok.at(1));
    } else if (key == "plan") {
      pending = Plan{};
      plan = &pending;
    } else if (key == "end") {
      if (!plan) fail(lineno, "'end' outside a plan block");
      doc.profile.plans.push_back(pending);
      plan = nullptr;
    } else if (plan) {
      if (key == "agent") {
        plan->agent_id = static_cast<int>(num(tok.at(1)));
      } else if (key == "goal_step") {
        plan->goal_step = static_cast<int>(num(tok.at(1)));
      } else if (key == "objective") {
        plan->objective = num(tok.at(1));
      } else if (key == "safety_term") {
        plan->safety_term = num(tok.at(1));
      } else if (key == "time_term") {
        plan->time_term = num(tok.at(1));
      } else if (key == "risk_bound") {
        plan->risk_bound = num(tok.at(1));
      } else if (key == "controls") {
        if (tok.size() % 2 != 1) fail(lineno, "controls need x y pairs");
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          plan->controls.push_back({num(tok[k]), num(tok[k + 1])});
        }
      } else if (key == "trajectory") {
        if (tok.size() % 2 != 1) fail(lineno, "trajectory needs x y pairs");
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          plan->expected_trajectory.push_back({num(tok[k]), num(tok[k + 1])});
        }
      } else if (key == "indicators") {
        for (size_t k = 1; k < tok.size(); ++k) {
          plan->goal_indicators.push_back(static_cast<int>(num(tok[k])));
        }
      } else if (key == "margin") {
        if (tok.size() != 7) fail(lineno, "margin needs 6 fields");
        MarginRecord m;
        m.constraint_id = static_cast<int>(num(tok[1]));
        m.other_agent = static_cast<int>(num(tok[2]));
        m.step = static_cast<int>(num(tok[3]));
        m.value = num(tok[4]);
        m.selected_face = static_cast<int>(num(tok[5]));
        m.counted = num(tok[6]) != 0.0;
        plan->margins.push_back(m);
      } else {
        fail(lineno, "unknown plan field '" + key + "'");
      }
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw std::runtime_error("profile: missing format_version");
  if (plan) throw std::runtime_error("profile: unterminated plan block");
  return doc;
}

void save_profile(const ProfileDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile file: " + path);
  out << serialize_profile(doc);
  if (!out) throw std::runtime_error("failed writing profile file: " + path);
}

ProfileDocument load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str());
}

}  // namespace pathgames
