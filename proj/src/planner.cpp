#include "pathgames/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pathgames {

namespace {

std::string tag(int agent, const char* base, int a, int b = -1, int c = -1) {
  std::string s = std::string(base) + std::to_string(agent) + "_" +
                  std::to_string(a);
  if (b >= 0) s += "_" + std::to_string(b);
  if (c >= 0) s += "_" + std::to_string(c);
  return s;
}

// Axis-aligned box pushed through r' = A r + B u with |u| <= bound.
struct Box2 {
  double xlo, xhi, ylo, yhi;
};

Box2 propagate_box(const Mat2& A, const Mat2& B, double bound, Box2 in) {
  auto mul = [](double m, double lo, double hi, double& out_lo,
                double& out_hi) {
    if (m >= 0) {
      out_lo = m * lo;
      out_hi = m * hi;
    } else {
      out_lo = m * hi;
      out_hi = m * lo;
    }
  };
  double a_lo, a_hi, b_lo, b_hi;
  Box2 out{};
  mul(A.a, in.xlo, in.xhi, a_lo, a_hi);
  mul(A.b, in.ylo, in.yhi, b_lo, b_hi);
  out.xlo = a_lo + b_lo - (std::abs(B.a) + std::abs(B.b)) * bound;
  out.xhi = a_hi + b_hi + (std::abs(B.a) + std::abs(B.b)) * bound;
  mul(A.c, in.xlo, in.xhi, a_lo, a_hi);
  mul(A.d, in.ylo, in.yhi, b_lo, b_hi);
  out.ylo = a_lo + b_lo - (std::abs(B.c) + std::abs(B.d)) * bound;
  out.yhi = a_hi + b_hi + (std::abs(B.c) + std::abs(B.d)) * bound;
  return out;
}

}  // namespace

void PlanParams::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0,1]");
  }
  if (!(big_m > 0.0)) throw std::invalid_argument("big_m must be positive");
  if (!(margin_cap > 0.0) || erf(margin_cap) < 1.0 - 1e-7) {
    throw std::invalid_argument("margin_cap too small: erf(cap) must be ~1");
  }
  if (!(goal_tolerance >= 0.0)) {
    throw std::invalid_argument("goal_tolerance must be nonnegative");
  }
}

AgentVars add_agent_vars(MilpModel& model, const AgentSpec& agent,
                         const PlanParams& params) {
  params.validate();
  if (!(agent.control_bound > 0.0)) {
    throw std::invalid_argument("control_bound must be positive");
  }
  const int T = params.horizon;
  if (agent.has_identity_dynamics()) {
    double need = (agent.goal - agent.start).norm_inf();
    if (std::ceil(need / agent.control_bound - 1e-12) > T) {
      throw std::invalid_argument(
          "horizon too short: the unobstructed straight path cannot reach "
          "the goal");
    }
  }

  AgentVars av;
  av.agent = agent;
  av.cov = propagate_covariance(agent.closed_loop(), agent.noise, T);

  for (int t = 0; t < T; ++t) {
    av.u.push_back({model.add_continuous(-agent.control_bound,
                                         agent.control_bound,
                                         tag(agent.id, "u", t, 0)),
                    model.add_continuous(-agent.control_bound,
                                         agent.control_bound,
                                         tag(agent.id, "u", t, 1))});
  }

  // Expected positions. With identity dynamics each r_t is substituted as
  // an affine function of the controls; otherwise r_t become variables tied
  // by the dynamics rows, boxed by interval propagation.
  av.r.resize(static_cast<size_t>(T) + 1);
  av.r[0] = {LinearExpr(agent.start.x), LinearExpr(agent.start.y)};
  std::vector<Box2> boxes(static_cast<size_t>(T) + 1);
  boxes[0] = {agent.start.x, agent.start.x, agent.start.y, agent.start.y};
  for (int t = 1; t <= T; ++t) {
    boxes[static_cast<size_t>(t)] =
        propagate_box(agent.A, agent.B, agent.control_bound,
                      boxes[static_cast<size_t>(t) - 1]);
  }
  if (agent.has_identity_dynamics()) {
    for (int t = 1; t <= T; ++t) {
      LinearExpr x = av.r[static_cast<size_t>(t) - 1][0];
      LinearExpr y = av.r[static_cast<size_t>(t) - 1][1];
      x.add_term(av.u[static_cast<size_t>(t) - 1][0], 1.0);
      y.add_term(av.u[static_cast<size_t>(t) - 1][1], 1.0);
      av.r[static_cast<size_t>(t)] = {std::move(x), std::move(y)};
    }
  } else {
    for (int t = 1; t <= T; ++t) {
      const Box2& bx = boxes[static_cast<size_t>(t)];
      VarId px = model.add_continuous(bx.xlo, bx.xhi, tag(agent.id, "r", t, 0));
      VarId py = model.add_continuous(bx.ylo, bx.yhi, tag(agent.id, "r", t, 1));
      // r_t = A r_{t-1} + B u_{t-1}
      LinearExpr rx = av.r[static_cast<size_t>(t) - 1][0] * agent.A.a +
                      av.r[static_cast<size_t>(t) - 1][1] * agent.A.b;
      rx.add_term(av.u[static_cast<size_t>(t) - 1][0], agent.B.a);
      rx.add_term(av.u[static_cast<size_t>(t) - 1][1], agent.B.b);
      rx.add_term(px, -1.0);
      model.add_constraint(std::move(rx), Sense::kEq, 0.0);
      LinearExpr ry = av.r[static_cast<size_t>(t) - 1][0] * agent.A.c +
                      av.r[static_cast<size_t>(t) - 1][1] * agent.A.d;
      ry.add_term(av.u[static_cast<size_t>(t) - 1][0], agent.B.c);
      ry.add_term(av.u[static_cast<size_t>(t) - 1][1], agent.B.d);
      ry.add_term(py, -1.0);
      model.add_constraint(std::move(ry), Sense::kEq, 0.0);
      av.r[static_cast<size_t>(t)] = {LinearExpr(px), LinearExpr(py)};
    }
  }

  // Goal indicators. A step whose reachable box provably excludes the goal
  // keeps its indicator pinned at zero.
  LinearExpr d_sum;
  for (int t = 0; t <= T; ++t) {
    const Box2& bx = boxes[static_cast<size_t>(t)];
    bool reachable = agent.goal.x >= bx.xlo - 1e-9 &&
                     agent.goal.x <= bx.xhi + 1e-9 &&
                     agent.goal.y >= bx.ylo - 1e-9 &&
                     agent.goal.y <= bx.yhi + 1e-9;
    VarId d = model.add_variable(VarKind::kBinary, 0.0, reachable ? 1.0 : 0.0,
                                 tag(agent.id, "d", t));
    av.d.push_back(d);
    d_sum.add_term(d, 1.0);
    if (!reachable) continue;
    const double M = params.big_m;
    for (int c = 0; c < 2; ++c) {
      double goal_c = c == 0 ? agent.goal.x : agent.goal.y;
      const LinearExpr& pos =
          av.r[static_cast<size_t>(t)][static_cast<size_t>(c)];
      // pos - goal <= M (1 - d)  and  goal - pos <= M (1 - d)
      LinearExpr upper = pos;
      upper.add_term(d, M);
      model.add_constraint(upper, Sense::kLe, goal_c + M);
      LinearExpr lower = LinearExpr(0.0) - pos;
      lower.add_term(d, M);
      model.add_constraint(lower, Sense::kLe, -goal_c + M);
      if (params.strengthen_relaxation) {
        double hi = c == 0 ? bx.xhi : bx.yhi;
        double lo = c == 0 ? bx.xlo : bx.ylo;
        double u_slack = hi - goal_c;
        double l_slack = goal_c - lo;
        if (u_slack < M) {
          LinearExpr e = pos;
          e.add_term(d, u_slack);
          model.add_constraint(e, Sense::kLe, goal_c + u_slack);
        }
        if (l_slack < M) {
          LinearExpr e = LinearExpr(0.0) - pos;
          e.add_term(d, l_slack);
          model.add_constraint(e, Sense::kLe, -goal_c + l_slack);
        }
      }
    }
  }
  model.add_constraint(d_sum, Sense::kEq, 1.0);
  return av;
}

void add_volume_rows(MilpModel& model, AgentVars& av,
                     const MovingVolumeSpec& vol, const PlanParams& params) {
  const int last = static_cast<int>(vol.offsets.size()) - 1;
  const double M = params.big_m;
  const double cap = params.margin_cap;
  for (int t = 0; t <= std::min(last, params.horizon); ++t) {
    const auto& faces = vol.base.faces();
    const Mat2& cov = vol.covariances[static_cast<size_t>(t)];

    // Slack range of every face over the variable box, at full margin.
    std::vector<double> coef(faces.size());
    std::vector<double> slack_lo(faces.size());
    int always_clear_face = -1;
    for (size_t p = 0; p < faces.size(); ++p) {
      const HalfSpace& f = faces[p];
      coef[p] = margin_coefficient(f.normal, cov, !params.legacy_margin);
      LinearExpr lhs = av.r[static_cast<size_t>(t)][0] * f.normal.x +
                       av.r[static_cast<size_t>(t)][1] * f.normal.y;
      lhs -= vol.offsets[static_cast<size_t>(t)][0] * f.normal.x +
             vol.offsets[static_cast<size_t>(t)][1] * f.normal.y;
      auto [lo, hi] = model.interval(lhs);
      (void)hi;
      slack_lo[p] = lo - f.offset - coef[p] * cap;
      if (always_clear_face < 0 && slack_lo[p] >= 0.0) {
        always_clear_face = static_cast<int>(p);
      }
    }

    VolumeStepEntry entry;
    entry.constraint_id = vol.constraint_id;
    entry.other_agent = vol.other_agent;
    entry.step = t;
    entry.margin = model.add_continuous(
        0.0, cap, tag(av.agent.id, "s", vol.constraint_id, t));
    entry.offset_constant =
        vol.offsets[static_cast<size_t>(t)][0].terms().empty() &&
        vol.offsets[static_cast<size_t>(t)][1].terms().empty();
    if (entry.offset_constant) {
      entry.offset = {vol.offsets[static_cast<size_t>(t)][0].constant(),
                      vol.offsets[static_cast<size_t>(t)][1].constant()};
    }

    if (always_clear_face >= 0) {
      // Some face separates every reachable position even at full margin:
      // the whole disjunction is satisfied for free.
      FaceEntry fe;
      fe.normal = faces[static_cast<size_t>(always_clear_face)].normal;
      fe.base_offset = faces[static_cast<size_t>(always_clear_face)].offset;
      fe.coefficient = coef[static_cast<size_t>(always_clear_face)];
      fe.fixed = true;
      entry.faces.push_back(fe);
      av.volume_steps.push_back(std::move(entry));
      continue;
    }

    entry.has_rows = true;
    LinearExpr z_sum;
    LinearExpr goal_relax;  // sum_{k<=t} d_k (own and, jointly, the other's)
    for (int k = 0; k <= t && k < static_cast<int>(av.d.size()); ++k) {
      goal_relax.add_term(av.d[static_cast<size_t>(k)], 1.0);
    }
    for (int k = 0;
         k <= t && k < static_cast<int>(vol.other_goal_vars.size()); ++k) {
      goal_relax.add_term(vol.other_goal_vars[static_cast<size_t>(k)], 1.0);
    }
    for (size_t p = 0; p < faces.size(); ++p) {
      const HalfSpace& f = faces[p];
      FaceEntry fe;
      fe.normal = f.normal;
      fe.base_offset = f.offset;
      fe.coefficient = coef[p];
      fe.z = model.add_binary(
          tag(av.agent.id, "z", vol.constraint_id, t, static_cast<int>(p)));
      z_sum.add_term(fe.z, 1.0);

      // a.r >= b + a.offset + coef*s - M(1-z) - M*relax
      double row_m = -slack_lo[p];  // smallest constant that deactivates
      if (row_m > M) {
        throw std::invalid_argument(
            "big_m too small to deactivate a collision row");
      }
      LinearExpr lhs = av.r[static_cast<size_t>(t)][0] * f.normal.x +
                       av.r[static_cast<size_t>(t)][1] * f.normal.y;
      lhs -= vol.offsets[static_cast<size_t>(t)][0] * f.normal.x +
             vol.offsets[static_cast<size_t>(t)][1] * f.normal.y;
      lhs.add_term(entry.margin, -fe.coefficient);
      LinearExpr pinned = lhs;
      pinned.add_term(fe.z, -M);
      pinned += goal_relax * M;
      model.add_constraint(std::move(pinned), Sense::kGe, f.offset - M);
      if (params.strengthen_relaxation && row_m < M) {
        LinearExpr tight = lhs;
        tight.add_term(fe.z, -row_m);
        tight += goal_relax * row_m;
        model.add_constraint(std::move(tight), Sense::kGe, f.offset - row_m);
      }
      entry.faces.push_back(fe);
    }
    model.add_constraint(z_sum, Sense::kGe, 1.0);
    av.volume_steps.push_back(std::move(entry));
  }
}

LinearExpr agent_objective(const AgentVars& av, const PlanParams& params) {
  LinearExpr obj;
  for (size_t t = 1; t < av.d.size(); ++t) {
    obj.add_term(av.d[t], params.lambda * static_cast<double>(t));
  }
  for (const VolumeStepEntry& e : av.volume_steps) {
    obj.add_term(e.margin, -(1.0 - params.lambda));
  }
  return obj;
}

Plan decode_agent(const MilpSolution& solution, const AgentVars& av,
                  const PlanParams& params,
                  const std::function<int(int)>& other_goal_step) {
  if (solution.status != SolveStatus::kOptimal &&
      solution.status != SolveStatus::kFeasible) {
    throw NoPlanError(solution.status,
                      std::string("no plan: solver returned ") +
                          to_string(solution.status));
  }
  Plan plan;
  plan.agent_id = av.agent.id;

  int goal_step = -1;
  double d_total = 0.0;
  for (size_t t = 0; t < av.d.size(); ++t) {
    double v = solution.value(av.d[t]);
    d_total += v;
    plan.goal_indicators.push_back(v > 0.5 ? 1 : 0);
    if (v > 0.5) {
      if (goal_step >= 0) {
        throw NoPlanError(solution.status,
                          "invalid solution: multiple goal indicators set");
      }
      goal_step = static_cast<int>(t);
    }
  }
  if (goal_step < 0 || std::abs(d_total - 1.0) > 1e-5) {
    throw NoPlanError(solution.status,
                      "invalid solution: goal indicators do not sum to one");
  }
  plan.goal_step = goal_step;
  plan.time_term = goal_step;

  const int T = params.horizon;
  for (int t = 0; t < T; ++t) {
    Vec2 u{solution.value(av.u[static_cast<size_t>(t)][0]),
           solution.value(av.u[static_cast<size_t>(t)][1])};
    if (t >= goal_step) u = {0.0, 0.0};  // arrived: remains there
    if (std::abs(u.x) > av.agent.control_bound + 1e-6 ||
        std::abs(u.y) > av.agent.control_bound + 1e-6) {
      throw NoPlanError(solution.status,
                        "invalid solution: control bound violated");
    }
    plan.controls.push_back(u);
  }

  Vec2 pos = av.agent.start;
  plan.expected_trajectory.push_back(pos);
  for (int t = 0; t < T; ++t) {
    if (t < goal_step) {
      pos = av.agent.A * pos +
            av.agent.B * plan.controls[static_cast<size_t>(t)];
    }
    plan.expected_trajectory.push_back(pos);
  }
  Vec2 at_goal = plan.expected_trajectory[static_cast<size_t>(goal_step)];
  if ((at_goal - av.agent.goal).norm1() > params.goal_tolerance + 1e-5) {
    throw NoPlanError(solution.status,
                      "invalid solution: goal row violated at the goal step");
  }

  double margin_sum = 0.0;
  plan.risk_bound = 0.0;
  for (const VolumeStepEntry& e : av.volume_steps) {
    MarginRecord rec;
    rec.constraint_id = e.constraint_id;
    rec.other_agent = e.other_agent;
    rec.step = e.step;
    rec.value = solution.value(e.margin);
    margin_sum += rec.value;
    if (e.faces.size() == 1 && e.faces[0].fixed) {
      rec.selected_face = 0;
    } else {
      double best = -1.0;
      for (size_t p = 0; p < e.faces.size(); ++p) {
        double zv = solution.value(e.faces[p].z);
        if (zv > best) {
          best = zv;
          rec.selected_face = static_cast<int>(p);
        }
      }
    }
    rec.counted = e.step <= goal_step;
    if (rec.counted && e.other_agent >= 0 && other_goal_step) {
      rec.counted = e.step <= other_goal_step(e.other_agent);
    }
    if (rec.counted) plan.risk_bound += risk_from_margin(rec.value);
    plan.margins.push_back(rec);
  }
  plan.safety_term = margin_sum == 0.0 ? 0.0 : -margin_sum;
  plan.objective = params.lambda * plan.time_term +
                   (1.0 - params.lambda) * plan.safety_term;
  return plan;
}

double plan_risk_bound(const Plan& plan) {
  double total = 0.0;
  for (const MarginRecord& rec : plan.margins) {
    if (rec.counted) total += risk_from_margin(rec.value);
  }
  return total;
}

PlanEncoding encode_plan(const AgentSpec& agent,
                         const std::vector<Polytope>& obstacles,
                         const PlanParams& params) {
  PlanEncoding enc;
  enc.params = params;
  std::vector<Polytope> volumes;
  volumes.reserve(obstacles.size());
  for (size_t n = 0; n < obstacles.size(); ++n) {
    Polytope k = collision_volume(agent.shape, obstacles[n]);
    if (contains(k, agent.start)) {
      throw InfeasibleSetupError(
          "start lies inside the collision volume of obstacle " +
          std::to_string(n));
    }
    if (contains(k, agent.goal)) {
      throw InfeasibleSetupError(
          "goal lies inside the collision volume of obstacle " +
          std::to_string(n));
    }
    volumes.push_back(std::move(k));
  }
  enc.vars = add_agent_vars(enc.model, agent, params);
  for (size_t n = 0; n < volumes.size(); ++n) {
    MovingVolumeSpec vol;
    vol.constraint_id = static_cast<int>(n);
    vol.base = volumes[n];
    vol.offsets.assign(static_cast<size_t>(params.horizon) + 1,
                       {LinearExpr(0.0), LinearExpr(0.0)});
    vol.covariances.resize(static_cast<size_t>(params.horizon) + 1);
    for (int t = 0; t <= params.horizon; ++t) {
      vol.covariances[static_cast<size_t>(t)] = enc.vars.cov.at(t);
    }
    add_volume_rows(enc.model, enc.vars, vol, params);
  }
  enc.model.set_objective(agent_objective(enc.vars, params));
  return enc;
}

PlanEncoding encode_best_response(
    const AgentSpec& agent,
    const std::vector<std::pair<AgentSpec, Plan>>& others,
    const PlanParams& params) {
  PlanEncoding enc;
  enc.params = params;
  enc.vars = add_agent_vars(enc.model, agent, params);
  for (const auto& [other, plan] : others) {
    if (plan.expected_trajectory.empty()) {
      throw std::invalid_argument("opponent plan is incomplete");
    }
    Polytope base = collision_volume(
        agent.shape, translate(other.shape.relative_region(), other.start));
    if (contains(base, agent.start)) {
      throw InfeasibleSetupError(
          "start lies inside the collision volume of agent " +
          std::to_string(other.id));
    }
    CovarianceSchedule other_cov =
        propagate_covariance(other.closed_loop(), other.noise, params.horizon);
    MovingVolumeSpec vol;
    vol.constraint_id = other.id;
    vol.other_agent = other.id;
    vol.base = std::move(base);
    const int last = std::min(plan.goal_step, params.horizon);
    for (int t = 0; t <= last; ++t) {
      Vec2 shift =
          plan.expected_trajectory[static_cast<size_t>(t)] - other.start;
      vol.offsets.push_back({LinearExpr(shift.x), LinearExpr(shift.y)});
      vol.covariances.push_back(enc.vars.cov.at(t) + other_cov.at(t));
    }
    add_volume_rows(enc.model, enc.vars, vol, params);
  }
  enc.model.set_objective(agent_objective(enc.vars, params));
  return enc;
}

Plan decode_plan(const MilpSolution& solution, const PlanEncoding& encoding) {
  return decode_agent(solution, encoding.vars, encoding.params);
}

Plan solve_plan(const AgentSpec& agent, const std::vector<Polytope>& obstacles,
                const PlanParams& params, const SolveOptions& options) {
  PlanEncoding enc = encode_plan(agent, obstacles, params);
  return decode_plan(solve(enc.model, options), enc);
}

std::vector<double> encode_warm_start(const PlanEncoding& encoding,
                                      const Plan& plan) {
  const AgentVars& av = encoding.vars;
  const PlanParams& params = encoding.params;
  if (plan.controls.size() != av.u.size() ||
      plan.expected_trajectory.size() != av.r.size()) {
    return {};
  }
  std::vector<double> values(
      static_cast<size_t>(encoding.model.num_variables()), 0.0);
  for (size_t t = 0; t < av.u.size(); ++t) {
    values[static_cast<size_t>(av.u[t][0].index)] = plan.controls[t].x;
    values[static_cast<size_t>(av.u[t][1].index)] = plan.controls[t].y;
  }
  for (size_t t = 0; t < av.d.size(); ++t) {
    values[static_cast<size_t>(av.d[t].index)] =
        plan.goal_step == static_cast<int>(t) ? 1.0 : 0.0;
  }
  if (!av.agent.has_identity_dynamics()) {
    for (size_t t = 1; t < av.r.size(); ++t) {
      for (int c = 0; c < 2; ++c) {
        const auto& terms = av.r[t][static_cast<size_t>(c)].terms();
        if (terms.size() == 1 && terms[0].second == 1.0) {
          Vec2 pos = plan.expected_trajectory[t];
          values[static_cast<size_t>(terms[0].first.index)] =
              c == 0 ? pos.x : pos.y;
        }
      }
    }
  }
  for (const VolumeStepEntry& e : av.volume_steps) {
    if (!e.offset_constant) return {};
    if (!e.has_rows) {
      values[static_cast<size_t>(e.margin.index)] = params.margin_cap;
      continue;
    }
    if (e.step >= plan.goal_step) {  // rows relaxed from arrival on
      values[static_cast<size_t>(e.margin.index)] = params.margin_cap;
      values[static_cast<size_t>(e.faces[0].z.index)] = 1.0;
      continue;
    }
    Vec2 own = plan.expected_trajectory[static_cast<size_t>(e.step)];
    double best_ratio = -1.0;
    size_t best_face = 0;
    for (size_t p = 0; p < e.faces.size(); ++p) {
      const FaceEntry& f = e.faces[p];
      double slack = f.normal.dot(own - e.offset) - f.base_offset;
      double ratio = f.coefficient > 1e-12
                         ? slack / f.coefficient
                         : (slack >= -1e-9 ? params.margin_cap : -1.0);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_face = p;
      }
    }
    if (best_ratio < 0.0) return {};  // trajectory violates this volume
    values[static_cast<size_t>(e.margin.index)] =
        std::clamp(best_ratio, 0.0, params.margin_cap);
    values[static_cast<size_t>(e.faces[best_face].z.index)] = 1.0;
  }
  if (!check_solution(encoding.model, values)) return {};
  return values;
}

Plan solve_best_response(const AgentSpec& agent,
                         const std::vector<std::pair<AgentSpec, Plan>>& others,
                         const PlanParams& params, const SolveOptions& options,
                         const Plan* warm_start) {
  PlanEncoding enc = encode_best_response(agent, others, params);
  SolveOptions opts = options;
  if (warm_start) {
    std::vector<double> seed = encode_warm_start(enc, *warm_start);
    if (!seed.empty()) opts.initial_solution = std::move(seed);
  }
  return decode_plan(solve(enc.model, opts), enc);
}

double evaluate_plan(const AgentSpec& agent, const Plan& plan,
                     const std::vector<std::pair<AgentSpec, Plan>>& others,
                     const PlanParams& params) {
  const CovarianceSchedule own_cov =
      propagate_covariance(agent.closed_loop(), agent.noise, params.horizon);
  double margin_sum = 0.0;
  for (const auto& [other, other_plan] : others) {
    Polytope base = collision_volume(
        agent.shape, translate(other.shape.relative_region(), other.start));
    CovarianceSchedule other_cov =
        propagate_covariance(other.closed_loop(), other.noise, params.horizon);
    const int last = std::min(other_plan.goal_step, params.horizon);
    for (int t = 0; t <= last; ++t) {
      if (t >= plan.goal_step) {  // row relaxed at and after arrival
        margin_sum += params.margin_cap;
        continue;
      }
      Vec2 own = plan.expected_trajectory[static_cast<size_t>(t)];
      Vec2 shift =
          other_plan.expected_trajectory[static_cast<size_t>(t)] - other.start;
      Mat2 cov = own_cov.at(t) + other_cov.at(t);
      double best = -1.0;
      for (const HalfSpace& f : base.faces()) {
        double coef = margin_coefficient(f.normal, cov, !params.legacy_margin);
        double slack = f.normal.dot(own) - f.offset - f.normal.dot(shift);
        double s = coef > 1e-12 ? slack / coef
                                : (slack >= -1e-9 ? params.margin_cap : -1.0);
        best = std::max(best, s);
      }
      if (best < 0.0) {
        return std::numeric_limits<double>::infinity();
      }
      margin_sum += std::min(params.margin_cap, best);
    }
  }
  return params.lambda * plan.goal_step - (1.0 - params.lambda) * margin_sum;
}

}  // namespace pathgames
