#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pathgames {

enum class VarKind { kContinuous, kBinary };

// Handle issued by a MilpModel; only meaningful for the issuing model.
struct VarId {
  int index = -1;
  constexpr bool valid() const { return index >= 0; }
  constexpr bool operator==(const VarId&) const = default;
};

// Affine expression: sum of (variable, coefficient) terms plus a constant.
// Duplicate variables are merged on normalization.
class LinearExpr {
 public:
  LinearExpr() = default;
  /*implicit*/ LinearExpr(double constant) : constant_(constant) {}
  /*implicit*/ LinearExpr(VarId v) { terms_.emplace_back(v, 1.0); }

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(double s);
  LinearExpr& add_term(VarId v, double coef);

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) {
    a += b;
    return a;
  }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) {
    a -= b;
    return a;
  }
  friend LinearExpr operator*(LinearExpr a, double s) {
    a *= s;
    return a;
  }
  friend LinearExpr operator*(double s, LinearExpr a) {
    a *= s;
    return a;
  }

  // Merges duplicate terms and drops zero coefficients.
  void normalize();

  const std::vector<std::pair<VarId, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }

 private:
  std::vector<std::pair<VarId, double>> terms_;
  double constant_ = 0.0;
};

enum class Sense { kLe, kEq, kGe };

struct Variable {
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;
  std::string name;
};

struct Constraint {
  std::vector<std::pair<VarId, double>> terms;  // merged, nonzero coefficients
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

class MilpModel {
 public:
  // Binary variables are forced to bounds within [0,1]. Continuous variables
  // require finite bounds (every model is box-bounded by construction).
  VarId add_variable(VarKind kind, double lower, double upper,
                     std::string name = {});
  VarId add_continuous(double lower, double upper, std::string name = {}) {
    return add_variable(VarKind::kContinuous, lower, upper, std::move(name));
  }
  VarId add_binary(std::string name = {}) {
    return add_variable(VarKind::kBinary, 0.0, 1.0, std::move(name));
  }

  // Records expr (sense) rhs; the expression constant folds into the rhs.
  int add_constraint(LinearExpr expr, Sense sense, double rhs);

  // Objective is always minimized.
  void set_objective(LinearExpr expr);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const { return num_binaries_; }
  const Variable& variable(VarId v) const;
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearExpr& objective() const { return objective_; }

  // [lo, hi] range of expr over the variable box (interval arithmetic).
  std::pair<double, double> interval(const LinearExpr& expr) const;

 private:
  void check_owned(VarId v) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  LinearExpr objective_;
  int num_binaries_ = 0;
};

enum class SolveStatus {
  kOptimal,       // incumbent within gap_tol of the best bound
  kFeasible,      // limit hit with an incumbent; `gap` is the proven gap
  kInfeasible,    // search exhausted without any feasible point
  kUnbounded,     // internal error for box-bounded models; never expected
  kLimitReached,  // limit hit without any incumbent
};

const char* to_string(SolveStatus s);

struct MilpSolution {
  SolveStatus status = SolveStatus::kLimitReached;
  std::vector<double> values;  // indexed by VarId; empty without incumbent
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;  // relative gap at stop
  long nodes_explored = 0;
  double wall_time_seconds = 0.0;

  bool has_values() const { return !values.empty(); }
  double value(VarId v) const { return values.at(static_cast<size_t>(v.index)); }
  double value(const LinearExpr& e) const;
};

class MilpBackend;

struct SolveOptions {
  double gap_tol = 1e-6;
  long node_limit = 200000;
  double time_limit_seconds = 120.0;
  // Optional warm start: full-length value vector of a feasible point. It is
  // verified and, when valid, becomes the initial incumbent.
  std::vector<double> initial_solution;
  const MilpBackend* backend = nullptr;  // null = built-in kernel
};

// Substitute point for the solver kernel, so an external solver can be
// plugged in behind the same model type.
class MilpBackend {
 public:
  virtual ~MilpBackend() = default;
  virtual MilpSolution solve(const MilpModel& model,
                             const SolveOptions& options) const = 0;
  virtual std::string name() const = 0;
};

const MilpBackend& reference_backend();

// Best-first branch and bound over the binaries, LP relaxations via the
// bounded-variable primal simplex. Every returned incumbent passes a
// feasibility replay before this function returns.
MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

// True when `values` satisfies bounds, constraints (1e-6 absolute) and
// binary integrality (1e-6).
bool check_solution(const MilpModel& model, const std::vector<double>& values,
                    std::string* why = nullptr);

// Plain-text dump (LP-style; grammar in docs/file-formats.md).
void write_lp(const MilpModel& model, std::ostream& os);

}  // namespace pathgames
