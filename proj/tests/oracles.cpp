#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pathgames/simplex.hpp"

namespace pathgames::oracles {

namespace {

// Stand-alone monotone chain, written separately from the library hull.
std::vector<Vec2> hull_of(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 p, Vec2 q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 &&
           (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 1e-12) {
      --k;
    }
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower &&
           (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 1e-12) {
      --k;
    }
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double point_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double denom = ab.dot(ab);
  double t = denom > 0 ? std::clamp(ab.dot(p - a) / denom, 0.0, 1.0) : 0.0;
  return (p - (a + ab * t)).norm();
}

double point_to_hull(Vec2 p, const std::vector<Vec2>& hull) {
  const std::size_t n = hull.size();
  if (n == 1) return (p - hull[0]).norm();
  bool inside = n >= 3;
  for (std::size_t i = 0; i < n && inside; ++i) {
    Vec2 a = hull[i], b = hull[(i + 1) % n];
    if ((b - a).cross(p - a) < -1e-12) inside = false;
  }
  if (inside && n >= 3) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 <= n; ++i) {
    best = std::min(best, point_to_segment(p, hull[i], hull[(i + 1) % n]));
    if (n == 2 && i == 0) break;
  }
  return best;
}

}  // namespace

std::vector<Vec2> minkowski_vertex_sum_hull(const std::vector<Vec2>& a,
                                            const std::vector<Vec2>& b) {
  std::vector<Vec2> sums;
  sums.reserve(a.size() * b.size());
  for (Vec2 p : a) {
    for (Vec2 q : b) sums.push_back(q - p);  // (-A) + B
  }
  return hull_of(std::move(sums));
}

double hull_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double d = 0.0;
  for (Vec2 p : a) d = std::max(d, point_to_hull(p, b));
  for (Vec2 p : b) d = std::max(d, point_to_hull(p, a));
  return d;
}

long double erf_series(long double x) {
  // erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_{n>=0} x^(2n+1) 2^n / (1*3*...*(2n+1))
  // All terms positive for x > 0: no cancellation anywhere in the sum.
  if (x < 0.0L) return -erf_series(-x);
  const long double two_over_sqrt_pi = 1.1283791670955125738961589031L;
  long double term = x;
  long double sum = x;
  for (int n = 1; n < 500; ++n) {
    term *= 2.0L * x * x / static_cast<long double>(2 * n + 1);
    sum += term;
    if (term < 1e-25L * sum) break;
  }
  return two_over_sqrt_pi * std::exp(-x * x) * sum;
}

Mat2 covariance_power_sum(const Mat2& a, const Mat2& sigma, int t) {
  auto mat_pow = [](Mat2 m, int e) {
    Mat2 r = Mat2::identity();
    for (int i = 0; i < e; ++i) r = r * m;
    return r;
  };
  Mat2 total = Mat2::zero();
  for (int k = 0; k <= t - 1; ++k) {
    Mat2 ap = mat_pow(a, t - k - 1);
    total = total + ap * sigma * ap.transposed();
  }
  return total;
}

BruteForceResult brute_force_milp(const MilpModel& model) {
  std::vector<int> binaries;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[static_cast<size_t>(j)].kind == VarKind::kBinary) {
      binaries.push_back(j);
    }
  }
  const int nb = static_cast<int>(binaries.size());
  const int n = model.num_variables();

  lp::LpProblem base;
  base.num_vars = n;
  base.cost.assign(static_cast<size_t>(n), 0.0);
  base.lower.resize(static_cast<size_t>(n));
  base.upper.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    base.lower[static_cast<size_t>(j)] = model.variables()[static_cast<size_t>(j)].lower;
    base.upper[static_cast<size_t>(j)] = model.variables()[static_cast<size_t>(j)].upper;
  }
  double offset = model.objective().constant();
  for (const auto& [v, c] : model.objective().terms()) {
    base.cost[static_cast<size_t>(v.index)] += c;
  }
  bool vacuous_infeasible = false;
  for (const Constraint& c : model.constraints()) {
    if (c.terms.empty()) {
      switch (c.sense) {
        case Sense::kLe: vacuous_infeasible |= !(0.0 <= c.rhs + 1e-9); break;
        case Sense::kGe: vacuous_infeasible |= !(0.0 >= c.rhs - 1e-9); break;
        case Sense::kEq: vacuous_infeasible |= !(std::abs(c.rhs) <= 1e-9); break;
      }
      continue;
    }
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    for (const auto& [v, coef] : c.terms) row[static_cast<size_t>(v.index)] = coef;
    switch (c.sense) {
      case Sense::kLe: base.add_row(row, -lp::kInf, c.rhs); break;
      case Sense::kGe: base.add_row(row, c.rhs, lp::kInf); break;
      case Sense::kEq: base.add_row(row, c.rhs, c.rhs); break;
    }
  }

  BruteForceResult best;
  if (vacuous_infeasible) return best;
  best.objective = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << nb); ++mask) {
    lp::LpProblem p = base;
    for (int k = 0; k < nb; ++k) {
      double v = (mask >> k) & 1 ? 1.0 : 0.0;
      p.lower[static_cast<size_t>(binaries[static_cast<size_t>(k)])] = v;
      p.upper[static_cast<size_t>(binaries[static_cast<size_t>(k)])] = v;
    }
    lp::LpResult r = lp::solve_lp(p);
    if (r.status != lp::LpStatus::kOptimal) continue;
    double obj = r.objective + offset;
    if (obj < best.objective - 1e-12) {
      best.feasible = true;
      best.objective = obj;
      best.values = r.x;
    }
  }
  if (!best.feasible) best.objective = 0.0;
  return best;
}

MilpModel random_box_milp(unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nbin_d(0, 12), ncont_d(1, 8),
      nrows_d(2, 15), terms_d(1, 5);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> sense_d(0, 5);

  MilpModel m;
  std::vector<VarId> vars;
  std::vector<double> witness;
  int nbin = nbin_d(rng), ncont = ncont_d(rng);
  for (int i = 0; i < nbin; ++i) {
    vars.push_back(m.add_binary());
    witness.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
  }
  for (int i = 0; i < ncont; ++i) {
    vars.push_back(m.add_continuous(-20.0, 20.0));
    witness.push_back(-20.0 + 40.0 * unit(rng));
  }
  int rows = nrows_d(rng);
  for (int r = 0; r < rows; ++r) {
    LinearExpr e;
    double at_witness = 0.0;
    int nt = std::min<int>(terms_d(rng), static_cast<int>(vars.size()));
    for (int k = 0; k < nt; ++k) {
      std::uniform_int_distribution<size_t> pick(0, vars.size() - 1);
      size_t j = pick(rng);
      double c = coef(rng);
      e.add_term(vars[j], c);
      at_witness += c * witness[j];
    }
    int sense = sense_d(rng);
    if (sense <= 2) {  // <= row, slack at the witness
      m.add_constraint(e, Sense::kLe, at_witness + 10.0 * unit(rng));
    } else if (sense == 3) {  // >= row, slack at the witness
      m.add_constraint(e, Sense::kGe, at_witness - 10.0 * unit(rng));
    } else if (sense == 4) {  // equality through the witness
      m.add_constraint(e, Sense::kEq, at_witness);
    } else {  // adversarial: may cut off the whole box
      m.add_constraint(e, Sense::kLe, at_witness - 60.0 * unit(rng));
    }
  }
  LinearExpr obj;
  for (VarId v : vars) obj.add_term(v, coef(rng));
  m.set_objective(obj);
  return m;
}

}  // namespace pathgames::oracles
