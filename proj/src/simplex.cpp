#include "pathgames/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pathgames::lp {

namespace {

enum class State : unsigned char { kBasic, kAtLower, kAtUpper };

// Dense bounded-variable primal simplex working state. Rows are kept as the
// homogeneous system  A x - r = 0  where r_i is the row activity variable
// bounded by the row's range, so the tableau right-hand side is always zero
// and basic values follow purely from the nonbasic bound values.
struct Work {
  int m = 0;         // rows
  int n_struct = 0;  // structural variables
  int ncols = 0;     // structural + activities + artificials
  std::vector<double> tab;   // m x ncols, row-major: B^val{-1} W
  std::vector<double> orig;  // m x ncols, the unreduced W (for rebuilds)
  std::vector<double> lower, upper, x;
  std::vector<double> cost;  // current phase costs
  std::vector<double> red;   // reduced costs
  std::vector<State> state;
  std::vector<int> basis;      // column basic in each row
  std::vector<int> basic_row;  // row of a basic column, else -1

  double* row(int i) { return tab.data() + static_cast<size_t>(i) * ncols; }
  const double* row(int i) const {
    return tab.data() + static_cast<size_t>(i) * ncols;
  }
  double* orow(int i) { return orig.data() + static_cast<size_t>(i) * ncols; }
};

void compute_basic_values(Work& w) {
  for (int i = 0; i < w.m; ++i) {
    const double* t = w.row(i);
    double v = 0.0;
    for (int j = 0; j < w.ncols; ++j) {
      if (w.state[j] != State::kBasic && w.x[j] != 0.0) v -= t[j] * w.x[j];
    }
    w.x[w.basis[i]] = v;
  }
}

void compute_reduced_costs(Work& w) {
  w.red = w.cost;
  for (int i = 0; i < w.m; ++i) {
    double cb = w.cost[w.basis[i]];
    if (cb == 0.0) continue;
    const double* t = w.row(i);
    for (int j = 0; j < w.ncols; ++j) w.red[j] -= cb * t[j];
  }
  for (int i = 0; i < w.m; ++i) w.red[w.basis[i]] = 0.0;
}

// Reduce the original system against the current basis from scratch:
// T := B^{-1} W via Gauss-Jordan. Returns false if the basis matrix is
// numerically singular.
bool rebuild_tableau(Work& w) {
  w.tab = w.orig;
  std::vector<char> used(w.m, 0);
  std::vector<int> pivot_row_of(w.m, -1);
  for (int k = 0; k < w.m; ++k) {
    int q = w.basis[k];
    int best = -1;
    double best_abs = 1e-11;
    for (int i = 0; i < w.m; ++i) {
      if (used[i]) continue;
      double a = std::abs(w.row(i)[q]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0) return false;
    used[best] = 1;
    pivot_row_of[k] = best;
    double* pr = w.row(best);
    double inv = 1.0 / pr[q];
    for (int j = 0; j < w.ncols; ++j) pr[j] *= inv;
    pr[q] = 1.0;
    for (int i = 0; i < w.m; ++i) {
      if (i == best) continue;
      double f = w.row(i)[q];
      if (f == 0.0) continue;
      double* ri = w.row(i);
      for (int j = 0; j < w.ncols; ++j) ri[j] -= f * pr[j];
      ri[q] = 0.0;
    }
  }
  // Permute rows so row k carries basis[k].
  std::vector<double> permuted(w.tab.size());
  for (int k = 0; k < w.m; ++k) {
    std::copy(w.row(pivot_row_of[k]), w.row(pivot_row_of[k]) + w.ncols,
              permuted.data() + static_cast<size_t>(k) * w.ncols);
  }
  w.tab.swap(permuted);
  return true;
}

struct Pricing {
  int col = -1;
  int direction = 0;  // +1 off lower, -1 off upper
};

Pricing price(const Work& w, bool bland, double cost_tol) {
  Pricing best;
  double best_score = cost_tol;
  for (int j = 0; j < w.ncols; ++j) {
    State st = w.state[j];
    if (st == State::kBasic) continue;
    if (w.lower[j] == w.upper[j]) continue;  // fixed
    double d = w.red[j];
    double score;
    int dir;
    if (st == State::kAtLower && d < -cost_tol) {
      score = -d;
      dir = +1;
    } else if (st == State::kAtUpper && d > cost_tol) {
      score = d;
      dir = -1;
    } else {
      continue;
    }
    if (bland) return {j, dir};  // lowest index eligible
    if (score > best_score) {
      best_score = score;
      best = {j, dir};
    }
  }
  return best;
}

struct RatioResult {
  double step = kInf;
  int row = -1;          // -1: entering hits its own opposite bound
  bool to_upper = false;  // side the leaving variable blocks at
};

RatioResult ratio_test(const Work& w, int q, int dir, bool bland,
                       double pivot_tol) {
  RatioResult best;
  best.step = w.upper[q] - w.lower[q];  // may be +inf
  double best_pivot = 0.0;
  for (int i = 0; i < w.m; ++i) {
    double wcol = w.row(i)[q];
    double rate = -dir * wcol;  // d x_basic / d t
    int b = w.basis[i];
    double t;
    bool to_upper;
    if (rate > pivot_tol) {
      if (w.upper[b] == kInf) continue;
      t = (w.upper[b] - w.x[b]) / rate;
      to_upper = true;
    } else if (rate < -pivot_tol) {
      if (w.lower[b] == -kInf) continue;
      t = (w.x[b] - w.lower[b]) / (-rate);
      to_upper = false;
    } else {
      continue;
    }
    if (t < 0.0) t = 0.0;  // slightly out-of-bound basics
    bool take = false;
    if (t < best.step - 1e-12) {
      take = true;
    } else if (t <= best.step + 1e-12 && best.row >= 0) {
      if (bland) {
        take = b < w.basis[best.row];
      } else {
        double p = std::abs(wcol);
        take = p > best_pivot + 1e-15 ||
               (p > best_pivot - 1e-15 && b < w.basis[best.row]);
      }
    } else if (t <= best.step + 1e-12 && best.row < 0 && t < best.step) {
      take = true;
    }
    if (take) {
      best.step = t;
      best.row = i;
      best.to_upper = to_upper;
      best_pivot = std::abs(wcol);
    }
  }
  return best;
}

void pivot(Work& w, int r, int q) {
  double* pr = w.row(r);
  double inv = 1.0 / pr[q];
  for (int j = 0; j < w.ncols; ++j) pr[j] *= inv;
  pr[q] = 1.0;
  for (int i = 0; i < w.m; ++i) {
    if (i == r) continue;
    double f = w.row(i)[q];
    if (f == 0.0) continue;
    double* ri = w.row(i);
    for (int j = 0; j < w.ncols; ++j) ri[j] -= f * pr[j];
    ri[q] = 0.0;
  }
  double f = w.red[q];
  if (f != 0.0) {
    for (int j = 0; j < w.ncols; ++j) w.red[j] -= f * pr[j];
    w.red[q] = 0.0;
  }
}

double phase_objective(const Work& w) {
  double obj = 0.0;
  for (int j = 0; j < w.ncols; ++j) obj += w.cost[j] * w.x[j];
  return obj;
}

// Core loop for the current phase cost vector. Returns kOptimal when no
// eligible entering column remains.
LpStatus run_phase(Work& w, const LpOptions& opt, int max_iters, int& iters) {
  bool bland = false;
  int degenerate_run = 0;
  int since_refresh = 0;
  while (iters < max_iters) {
    Pricing pr = price(w, bland, opt.cost_tol);
    if (pr.col < 0) return LpStatus::kOptimal;
    RatioResult rt = ratio_test(w, pr.col, pr.direction, bland, opt.pivot_tol);
    if (rt.step == kInf) return LpStatus::kUnbounded;
    ++iters;
    ++since_refresh;
    if (rt.row < 0) {
      // Bound flip: entering variable crosses to its opposite bound.
      double t = rt.step;
      int q = pr.col;
      for (int i = 0; i < w.m; ++i) {
        double wcol = w.row(i)[q];
        if (wcol != 0.0) w.x[w.basis[i]] -= pr.direction * t * wcol;
      }
      w.x[q] = pr.direction > 0 ? w.upper[q] : w.lower[q];
      w.state[q] = pr.direction > 0 ? State::kAtUpper : State::kAtLower;
      degenerate_run = 0;
      bland = false;
      continue;
    }
    // Basis change.
    int q = pr.col;
    int r = rt.row;
    int leaving = w.basis[r];
    double t = rt.step;
    for (int i = 0; i < w.m; ++i) {
      double wcol = w.row(i)[q];
      if (wcol != 0.0) w.x[w.basis[i]] -= pr.direction * t * wcol;
    }
    w.x[q] = (pr.direction > 0 ? w.lower[q] : w.upper[q]) + pr.direction * t;
    w.x[leaving] = rt.to_upper ? w.upper[leaving] : w.lower[leaving];
    w.state[leaving] = rt.to_upper ? State::kAtUpper : State::kAtLower;
    w.state[q] = State::kBasic;
    w.basis[r] = q;
    w.basic_row[leaving] = -1;
    w.basic_row[q] = r;
    pivot(w, r, q);

    if (t <= 1e-11) {
      if (++degenerate_run > 40) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    if (since_refresh >= opt.refresh_every) {
      since_refresh = 0;
      if (!rebuild_tableau(w)) return LpStatus::kNumericalError;
      compute_basic_values(w);
      compute_reduced_costs(w);
    }
  }
  return LpStatus::kIterLimit;
}

}  // namespace

int LpProblem::add_row(const std::vector<double>& coefs, double lo,
                       double hi) {
  rows.push_back(coefs);
  row_lower.push_back(lo);
  row_upper.push_back(hi);
  return static_cast<int>(rows.size()) - 1;
}

LpResult solve_lp(const LpProblem& p, const LpOptions& options) {
  const int n = p.num_vars;
  const int m = static_cast<int>(p.rows.size());
  for (int j = 0; j < n; ++j) {
    if (p.lower[j] == -kInf && p.upper[j] == kInf) {
      throw std::invalid_argument("free variables are not supported");
    }
    if (p.lower[j] > p.upper[j]) {
      LpResult r;
      r.status = LpStatus::kInfeasible;
      return r;
    }
  }

  Work w;
  w.m = m;
  w.n_struct = n;

  // Nonbasic starting point: each structural variable at a finite bound.
  std::vector<double> x0(n);
  std::vector<State> st0(n);
  for (int j = 0; j < n; ++j) {
    if (p.lower[j] != -kInf) {
      x0[j] = p.lower[j];
      st0[j] = State::kAtLower;
    } else {
      x0[j] = p.upper[j];
      st0[j] = State::kAtUpper;
    }
  }

  // Row activities at the starting point; violated rows get an artificial.
  std::vector<double> activity(m, 0.0);
  std::vector<int> art_sign(m, 0);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += p.rows[i][j] * x0[j];
    activity[i] = v;
    if (v < p.row_lower[i] - 1e-12 || v > p.row_upper[i] + 1e-12) {
      art_sign[i] = v > p.row_upper[i] ? +1 : -1;
      ++n_art;
    }
  }

  w.ncols = n + m + n_art;
  w.tab.assign(static_cast<size_t>(m) * w.ncols, 0.0);
  w.orig.assign(static_cast<size_t>(m) * w.ncols, 0.0);
  w.lower.assign(w.ncols, 0.0);
  w.upper.assign(w.ncols, 0.0);
  w.x.assign(w.ncols, 0.0);
  w.state.assign(w.ncols, State::kAtLower);
  w.basis.assign(m, -1);
  w.basic_row.assign(w.ncols, -1);

  for (int j = 0; j < n; ++j) {
    w.lower[j] = p.lower[j];
    w.upper[j] = p.upper[j];
    w.x[j] = x0[j];
    w.state[j] = st0[j];
  }
  int next_art = n + m;
  for (int i = 0; i < m; ++i) {
    double* orow = w.orow(i);
    for (int j = 0; j < n; ++j) orow[j] = p.rows[i][j];
    orow[n + i] = -1.0;  // activity column
    w.lower[n + i] = p.row_lower[i];
    w.upper[n + i] = p.row_upper[i];
    if (w.lower[n + i] == -kInf && w.upper[n + i] == kInf) {
      throw std::invalid_argument("rows need at least one finite bound");
    }
    if (art_sign[i] == 0) {
      w.basis[i] = n + i;
      w.basic_row[n + i] = i;
      w.state[n + i] = State::kBasic;
      w.x[n + i] = activity[i];
    } else {
      // Activity clamps to the violated side; artificial absorbs the rest.
      double clamped = art_sign[i] > 0 ? p.row_upper[i] : p.row_lower[i];
      w.x[n + i] = clamped;
      w.state[n + i] =
          art_sign[i] > 0 ? State::kAtUpper : State::kAtLower;
      // Row reads A x - r + s*a = 0, so s must oppose the violation sign.
      int acol = next_art++;
      orow[acol] = art_sign[i] > 0 ? -1.0 : 1.0;
      w.lower[acol] = 0.0;
      w.upper[acol] = kInf;
      w.x[acol] = std::abs(activity[i] - clamped);
      w.state[acol] = State::kBasic;
      w.basis[i] = acol;
      w.basic_row[acol] = i;
    }
  }

  // Initial reduced tableau: scale each row so its basic column reads +1.
  w.tab = w.orig;
  for (int i = 0; i < m; ++i) {
    double piv = w.row(i)[w.basis[i]];
    if (piv != 1.0) {
      double inv = 1.0 / piv;
      double* ri = w.row(i);
      for (int j = 0; j < w.ncols; ++j) ri[j] *= inv;
      ri[w.basis[i]] = 1.0;
    }
  }

  LpOptions opt = options;
  int max_iters = opt.max_iterations > 0
                      ? opt.max_iterations
                      : std::min(400 + 60 * (m + n), 400000);
  LpResult result;
  int iters = 0;

  if (n_art > 0) {
    w.cost.assign(w.ncols, 0.0);
    for (int j = n + m; j < w.ncols; ++j) w.cost[j] = 1.0;
    compute_reduced_costs(w);
    LpStatus s = run_phase(w, opt, max_iters, iters);
    if (s == LpStatus::kUnbounded || s == LpStatus::kNumericalError) {
      result.status = LpStatus::kNumericalError;  // phase 1 cannot be unbounded
      result.iterations = iters;
      return result;
    }
    if (s == LpStatus::kIterLimit) {
      result.status = s;
      result.iterations = iters;
      return result;
    }
    double infeas = phase_objective(w);
    if (infeas > 1e-7) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iters;
      return result;
    }
    // Pin artificials at zero for phase 2.
    for (int j = n + m; j < w.ncols; ++j) {
      w.upper[j] = 0.0;
      if (w.state[j] != State::kBasic) w.x[j] = 0.0;
    }
  }

  w.cost.assign(w.ncols, 0.0);
  for (int j = 0; j < n; ++j) w.cost[j] = p.cost[j];
  compute_reduced_costs(w);

  LpStatus s = run_phase(w, opt, max_iters, iters);
  if (s == LpStatus::kOptimal) {
    // Verified exit: rebuild from the original data and confirm optimality.
    for (int pass = 0; pass < 3 && s == LpStatus::kOptimal; ++pass) {
      if (!rebuild_tableau(w)) {
        s = LpStatus::kNumericalError;
        break;
      }
      compute_basic_values(w);
      compute_reduced_costs(w);
      if (price(w, false, opt.cost_tol).col < 0) break;
      s = run_phase(w, opt, max_iters, iters);
    }
  }
  result.status = s;
  result.iterations = iters;
  if (s != LpStatus::kOptimal) return result;

  result.x.assign(w.x.begin(), w.x.begin() + n);
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += p.cost[j] * result.x[j];
  result.objective = obj;
  result.basis = w.basis;
  return result;
}

}  // namespace pathgames::lp
