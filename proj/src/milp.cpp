#include "pathgames/milp.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "pathgames/simplex.hpp"

namespace pathgames {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegralityTol = 1e-6;
constexpr double kFeasTol = 1e-6;

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}
}  // namespace

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  for (const auto& [v, c] : o.terms_) terms_.emplace_back(v, -c);
  constant_ -= o.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  for (auto& [v, c] : terms_) c *= s;
  constant_ *= s;
  return *this;
}

LinearExpr& LinearExpr::add_term(VarId v, double coef) {
  terms_.emplace_back(v, coef);
  return *this;
}

void LinearExpr::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return a.first.index < b.first.index; });
  std::vector<std::pair<VarId, double>> merged;
  merged.reserve(terms_.size());
  for (const auto& [v, c] : terms_) {
    if (!merged.empty() && merged.back().first == v) {
      merged.back().second += c;
    } else {
      merged.emplace_back(v, c);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  terms_ = std::move(merged);
}

VarId MilpModel::add_variable(VarKind kind, double lower, double upper,
                              std::string name) {
  if (!(lower <= upper)) {
    throw std::invalid_argument("variable bounds are inverted");
  }
  if (kind == VarKind::kBinary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
    if (lower > upper) throw std::invalid_argument("binary bounds exceed [0,1]");
    ++num_binaries_;
  } else if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw std::invalid_argument("continuous variables need finite bounds");
  }
  variables_.push_back({kind, lower, upper, std::move(name)});
  return VarId{static_cast<int>(variables_.size()) - 1};
}

void MilpModel::check_owned(VarId v) const {
  if (v.index < 0 || v.index >= num_variables()) {
    throw std::invalid_argument("variable does not belong to this model");
  }
}

int MilpModel::add_constraint(LinearExpr expr, Sense sense, double rhs) {
  expr.normalize();
  for (const auto& [v, c] : expr.terms()) {
    check_owned(v);
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient");
  }
  Constraint c;
  c.terms = expr.terms();
  c.sense = sense;
  c.rhs = rhs - expr.constant();
  constraints_.push_back(std::move(c));
  return num_constraints() - 1;
}

void MilpModel::set_objective(LinearExpr expr) {
  expr.normalize();
  for (const auto& [v, c] : expr.terms()) check_owned(v);
  objective_ = std::move(expr);
}

const Variable& MilpModel::variable(VarId v) const {
  check_owned(v);
  return variables_[static_cast<size_t>(v.index)];
}

std::pair<double, double> MilpModel::interval(const LinearExpr& expr) const {
  double lo = expr.constant(), hi = expr.constant();
  for (const auto& [v, c] : expr.terms()) {
    const Variable& var = variable(v);
    if (c >= 0.0) {
      lo += c * var.lower;
      hi += c * var.upper;
    } else {
      lo += c * var.upper;
      hi += c * var.lower;
    }
  }
  return {lo, hi};
}

double MilpSolution::value(const LinearExpr& e) const {
  double v = e.constant();
  for (const auto& [var, c] : e.terms()) v += c * value(var);
  return v;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kFeasible: return "Feasible";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kLimitReached: return "LimitReached";
  }
  return "?";
}

bool check_solution(const MilpModel& model, const std::vector<double>& values,
                    std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (values.size() != static_cast<size_t>(model.num_variables())) {
    return fail("value vector length mismatch");
  }
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variables()[static_cast<size_t>(j)];
    double x = values[static_cast<size_t>(j)];
    if (!std::isfinite(x)) return fail("non-finite value");
    if (x < v.lower - kFeasTol || x > v.upper + kFeasTol) {
      return fail("bound violated on variable " + std::to_string(j));
    }
    if (v.kind == VarKind::kBinary &&
        std::abs(x - std::round(x)) > kIntegralityTol) {
      return fail("binary not integral: variable " + std::to_string(j));
    }
  }
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Constraint& c = model.constraints()[static_cast<size_t>(i)];
    double act = 0.0;
    for (const auto& [v, coef] : c.terms) {
      act += coef * values[static_cast<size_t>(v.index)];
    }
    double tol = kFeasTol;
    bool ok = true;
    switch (c.sense) {
      case Sense::kLe: ok = act <= c.rhs + tol; break;
      case Sense::kGe: ok = act >= c.rhs - tol; break;
      case Sense::kEq: ok = std::abs(act - c.rhs) <= tol; break;
    }
    if (!ok) return fail("constraint " + std::to_string(i) + " violated");
  }
  return true;
}

namespace {

struct BaseLp {
  lp::LpProblem problem;
  bool trivially_infeasible = false;
  double objective_offset = 0.0;
};

BaseLp build_base_lp(const MilpModel& model) {
  BaseLp base;
  lp::LpProblem& p = base.problem;
  const int n = model.num_variables();
  p.num_vars = n;
  p.cost.assign(static_cast<size_t>(n), 0.0);
  p.lower.resize(static_cast<size_t>(n));
  p.upper.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    p.lower[static_cast<size_t>(j)] = model.variables()[static_cast<size_t>(j)].lower;
    p.upper[static_cast<size_t>(j)] = model.variables()[static_cast<size_t>(j)].upper;
  }
  base.objective_offset = model.objective().constant();
  for (const auto& [v, c] : model.objective().terms()) {
    p.cost[static_cast<size_t>(v.index)] += c;
  }
  for (const Constraint& c : model.constraints()) {
    if (c.terms.empty()) {
      bool ok = true;
      switch (c.sense) {
        case Sense::kLe: ok = 0.0 <= c.rhs + kFeasTol; break;
        case Sense::kGe: ok = 0.0 >= c.rhs - kFeasTol; break;
        case Sense::kEq: ok = std::abs(c.rhs) <= kFeasTol; break;
      }
      if (!ok) base.trivially_infeasible = true;
      continue;
    }
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    double scale = 0.0;
    for (const auto& [v, coef] : c.terms) {
      row[static_cast<size_t>(v.index)] = coef;
      scale = std::max(scale, std::abs(coef));
    }
    double inv = 1.0 / scale;  // row equilibration
    for (double& r : row) r *= inv;
    double rhs = c.rhs * inv;
    switch (c.sense) {
      case Sense::kLe: p.add_row(row, -lp::kInf, rhs); break;
      case Sense::kGe: p.add_row(row, rhs, lp::kInf); break;
      case Sense::kEq: p.add_row(row, rhs, rhs); break;
    }
  }
  return base;
}

struct Node {
  double bound = -kInf;
  long id = 0;
  int depth = 0;
  // Binary fixings on the path from the root: (variable, value).
  std::vector<std::pair<int, char>> fixings;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;   // min bound first
    if (a.depth != b.depth) return a.depth < b.depth;   // deeper first
    return a.id > b.id;                                 // older first
  }
};

class ReferenceBackend final : public MilpBackend {
 public:
  MilpSolution solve(const MilpModel& model,
                     const SolveOptions& options) const override;
  std::string name() const override { return "reference"; }
};

MilpSolution ReferenceBackend::solve(const MilpModel& model,
                                     const SolveOptions& options) const {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  MilpSolution out;
  BaseLp base = build_base_lp(model);
  if (base.trivially_infeasible) {
    out.status = SolveStatus::kInfeasible;
    out.wall_time_seconds = elapsed();
    return out;
  }

  std::vector<int> binary_vars;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[static_cast<size_t>(j)].kind == VarKind::kBinary) {
      binary_vars.push_back(j);
    }
  }

  bool have_incumbent = false;
  std::vector<double> incumbent;
  double incumbent_obj = kInf;
  if (!options.initial_solution.empty()) {
    std::string why;
    if (check_solution(model, options.initial_solution, &why)) {
      incumbent = options.initial_solution;
      have_incumbent = true;
      incumbent_obj = base.objective_offset;
      for (int j = 0; j < model.num_variables(); ++j) {
        incumbent_obj +=
            base.problem.cost[static_cast<size_t>(j)] * incumbent[static_cast<size_t>(j)];
      }
    }
  }

  lp::LpProblem work = base.problem;
  lp::LpOptions lp_opts;
  auto solve_node = [&](const Node& node) {
    for (const auto& [var, val] : node.fixings) {
      work.lower[static_cast<size_t>(var)] = val;
      work.upper[static_cast<size_t>(var)] = val;
    }
    lp::LpResult r = lp::solve_lp(work, lp_opts);
    for (const auto& [var, unused] : node.fixings) {
      (void)unused;
      work.lower[static_cast<size_t>(var)] =
          base.problem.lower[static_cast<size_t>(var)];
      work.upper[static_cast<size_t>(var)] =
          base.problem.upper[static_cast<size_t>(var)];
    }
    return r;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push(Node{-kInf, next_id++, 0, {}});
  long nodes = 0;
  double best_open_bound = -kInf;
  bool limit_hit = false;

  while (!open.empty()) {
    best_open_bound = open.top().bound;
    if (have_incumbent && best_open_bound >= incumbent_obj - 1e-9) {
      // Every open node is dominated; the incumbent is optimal.
      open = {};
      break;
    }
    if (have_incumbent) {
      double slack = incumbent_obj - best_open_bound;
      if (slack <= options.gap_tol * std::max(1.0, std::abs(incumbent_obj))) {
        break;  // proven within the requested gap
      }
    }
    if (nodes >= options.node_limit || elapsed() > options.time_limit_seconds) {
      limit_hit = true;
      break;
    }

    Node node = open.top();
    open.pop();
    ++nodes;
    lp::LpResult rel = solve_node(node);
    if (rel.status == lp::LpStatus::kInfeasible) continue;
    if (rel.status != lp::LpStatus::kOptimal) {
      throw std::logic_error(
          "internal solver error: LP relaxation of a box-bounded model "
          "reported " +
          std::to_string(static_cast<int>(rel.status)));
    }
    double bound = std::max(node.bound, rel.objective + base.objective_offset);
    if (have_incumbent && bound >= incumbent_obj - 1e-9) continue;

    // Most fractional binary; ties to the lowest variable id.
    int branch_var = -1;
    double branch_score = kIntegralityTol;
    for (int j : binary_vars) {
      double x = rel.x[static_cast<size_t>(j)];
      double frac = std::min(std::abs(x), std::abs(1.0 - x));
      if (frac > branch_score) {
        branch_score = frac;
        branch_var = j;
      }
    }
    if (branch_var < 0) {
      // Integral: snap binaries and keep the point if it verifies.
      std::vector<double> candidate = rel.x;
      for (int j : binary_vars) {
        candidate[static_cast<size_t>(j)] = std::round(candidate[static_cast<size_t>(j)]);
      }
      std::string why;
      const std::vector<double>* chosen = nullptr;
      if (check_solution(model, candidate, &why)) {
        chosen = &candidate;
      } else if (check_solution(model, rel.x, &why)) {
        chosen = &rel.x;
      }
      if (chosen) {
        double cand_obj = base.objective_offset;
        for (int j = 0; j < model.num_variables(); ++j) {
          cand_obj += base.problem.cost[static_cast<size_t>(j)] *
                      (*chosen)[static_cast<size_t>(j)];
        }
        if (cand_obj < incumbent_obj - 1e-12) {
          incumbent = *chosen;
          incumbent_obj = cand_obj;
          have_incumbent = true;
        }
      }
      continue;
    }
    Node down{bound, next_id++, node.depth + 1, node.fixings};
    down.fixings.emplace_back(branch_var, 0);
    Node up{bound, next_id++, node.depth + 1, node.fixings};
    up.fixings.emplace_back(branch_var, 1);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  out.nodes_explored = nodes;
  out.wall_time_seconds = elapsed();
  double final_bound = open.empty() ? (have_incumbent ? incumbent_obj : kInf)
                                    : best_open_bound;
  out.best_bound = final_bound;
  if (have_incumbent) {
    out.values = std::move(incumbent);
    out.objective = incumbent_obj;
    out.gap = (incumbent_obj - final_bound) /
              std::max(1.0, std::abs(incumbent_obj));
    out.gap = std::max(out.gap, 0.0);
    out.status = (!limit_hit || out.gap <= options.gap_tol)
                     ? SolveStatus::kOptimal
                     : SolveStatus::kFeasible;
    std::string why;
    if (!check_solution(model, out.values, &why)) {
      throw std::logic_error("internal solver error: incumbent fails replay: " +
                             why);
    }
  } else {
    out.status = limit_hit ? SolveStatus::kLimitReached : SolveStatus::kInfeasible;
    out.gap = kInf;
  }
  return out;
}

const ReferenceBackend g_reference_backend;

}  // namespace

const MilpBackend& reference_backend() { return g_reference_backend; }

MilpSolution solve(const MilpModel& model, const SolveOptions& options) {
  const MilpBackend* backend =
      options.backend ? options.backend : &g_reference_backend;
  return backend->solve(model, options);
}

void write_lp(const MilpModel& model, std::ostream& os) {
  os << "\\ pathgames model: " << model.num_variables() << " variables, "
     << model.num_constraints() << " constraints\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variables()[static_cast<size_t>(j)];
    if (!v.name.empty()) os << "\\ x" << j << " = " << v.name << "\n";
  }
  auto write_terms = [&](const std::vector<std::pair<VarId, double>>& terms) {
    bool first = true;
    for (const auto& [v, c] : terms) {
      double coef = c;
      if (first) {
        if (coef < 0) {
          os << "- ";
          coef = -coef;
        }
        first = false;
      } else {
        os << (coef < 0 ? " - " : " + ");
        coef = std::abs(coef);
      }
      os << format_double(coef) << " x" << v.index;
    }
    if (first) os << "0";
  };
  os << "Minimize\n obj: ";
  write_terms(model.objective().terms());
  if (model.objective().constant() != 0.0) {
    double c = model.objective().constant();
    os << (c < 0 ? " - " : " + ") << format_double(std::abs(c));
  }
  os << "\nSubject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Constraint& c = model.constraints()[static_cast<size_t>(i)];
    os << " c" << i << ": ";
    write_terms(c.terms);
    switch (c.sense) {
      case Sense::kLe: os << " <= "; break;
      case Sense::kGe: os << " >= "; break;
      case Sense::kEq: os << " = "; break;
    }
    os << format_double(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variables()[static_cast<size_t>(j)];
    if (v.kind == VarKind::kBinary) continue;
    os << " " << format_double(v.lower) << " <= x" << j << " <= "
       << format_double(v.upper) << "\n";
  }
  bool any_binary = false;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[static_cast<size_t>(j)].kind == VarKind::kBinary) {
      if (!any_binary) {
        os << "Binary\n";
        any_binary = true;
      }
      os << " x" << j << "\n";
    }
  }
  os << "End\n";
}

}  // namespace pathgames
