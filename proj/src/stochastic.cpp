#include "pathgames/stochastic.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace pathgames {

namespace {

std::atomic<std::uint64_t> g_margin_clamps{0};

// Rational Chebyshev approximations from W. J. Cody, "Rational Chebyshev
// approximation for the error function", Math. Comp. 23 (1969); the SPECFUN
// coefficient set, good to ~1e-16 relative.
constexpr double kErfA[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                             3.77485237685302021e2, 3.20937758913846947e3,
                             1.85777706184603153e-1};
constexpr double kErfB[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                             1.28261652607737228e3, 2.84423683343917062e3};
constexpr double kErfC[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                             6.61191906371416295e1,  2.98635138197400131e2,
                             8.81952221241769090e2,  1.71204761263407058e3,
                             2.05107837782607147e3,  1.23033935479799725e3,
                             2.15311535474403846e-8};
constexpr double kErfD[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                             5.37181101862009858e2, 1.62138957456669019e3,
                             3.29079923573345963e3, 4.36261909014324716e3,
                             3.43936767414372164e3, 1.23033935480374942e3};
constexpr double kErfP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                             1.25781726111229246e-1, 1.60837851487422766e-2,
                             6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr double kErfQ[5] = {2.56852019228982242e0, 1.87295284992346047e0,
                             5.27905102951428412e-1, 6.05183413124413191e-2,
                             2.33520497626869185e-3};

constexpr double kInvSqrtPi = 5.6418958354775628695e-1;

// exp(-x^2) with the argument split to avoid cancellation in x*x.
double exp_neg_sq(double y) {
  double ysq = std::trunc(y * 16.0) / 16.0;
  double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc on [0.46875, inf).
double erfc_tail(double y) {
  if (y <= 4.0) {
    double num = kErfC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kErfC[i]) * y;
      den = (den + kErfD[i]) * y;
    }
    return exp_neg_sq(y) * (num + kErfC[7]) / (den + kErfD[7]);
  }
  double z = 1.0 / (y * y);
  double num = kErfP[5] * z;
  double den = z;
  for (int i = 0; i < 4; ++i) {
    num = (num + kErfP[i]) * z;
    den = (den + kErfQ[i]) * z;
  }
  double r = z * (num + kErfP[4]) / (den + kErfQ[4]);
  return exp_neg_sq(y) * (kInvSqrtPi - r) / y;
}

}  // namespace

double erf(double x) {
  double y = std::abs(x);
  if (y <= 0.46875) {
    double ysq = y > 1e-300 ? y * y : 0.0;
    double num = kErfA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
      num = (num + kErfA[i]) * ysq;
      den = (den + kErfB[i]) * ysq;
    }
    return x * (num + kErfA[3]) / (den + kErfB[3]);
  }
  if (y >= 27.0) return x > 0 ? 1.0 : -1.0;
  double result = 1.0 - erfc_tail(y);
  return x > 0 ? result : -result;
}

double erf_inv(double y) {
  if (!(std::abs(y) < 1.0)) {
    throw std::domain_error("erf_inv requires |y| < 1");
  }
  if (y == 0.0) return 0.0;

  // First guess: low-order rational fits (central and tail), then Newton
  // steps against erf() finish the job.
  double ay = std::abs(y);
  double x;
  if (ay <= 0.7) {
    double z = y * y;
    double num = (((-0.140543331 * z + 0.914624893) * z - 1.645349621) * z +
                  0.886226899);
    double den = ((((0.012229801 * z - 0.329097515) * z + 1.442710462) * z -
                   2.118377725) * z + 1.0);
    x = y * num / den;
  } else {
    double z = std::sqrt(-std::log(0.5 * (1.0 - ay)));
    double num = ((1.641345311 * z + 3.429567803) * z - 1.62490649) * z -
                 1.970840454;
    double den = (1.637067800 * z + 3.543889200) * z + 1.0;
    x = std::copysign(num / den, y);
  }
  for (int i = 0; i < 3; ++i) {
    double xx = x * x;
    if (xx > 700.0) break;  // derivative overflows; guess is already tight
    x -= (erf(x) - y) * 0.5 / (kInvSqrtPi * std::exp(-xx));
  }
  return x;
}

NoiseModel::NoiseModel(Mat2 sigma) : sigma_(sigma) {
  if (!sigma.is_symmetric(1e-12)) {
    throw std::invalid_argument("noise covariance must be symmetric");
  }
  double lo, hi;
  sigma.symmetric_eigenvalues(lo, hi);
  if (lo < -1e-12) {
    throw std::invalid_argument("noise covariance must be PSD");
  }
}

NoiseModel NoiseModel::isotropic(double variance) {
  return NoiseModel(Mat2::scale(variance));
}

Mat2 NoiseModel::cholesky_factor() const {
  double a = std::max(sigma_.a, 0.0);
  double l11 = std::sqrt(a);
  double l21 = l11 > 0.0 ? sigma_.c / l11 : 0.0;
  double rest = sigma_.d - l21 * l21;
  double l22 = std::sqrt(std::max(rest, 0.0));
  return {l11, 0.0, l21, l22};
}

Mat2 closed_loop_matrix(const Mat2& A, const Mat2& B, double k) {
  return A - B * k;
}

CovarianceSchedule propagate_covariance(const Mat2& a_cl,
                                        const NoiseModel& noise,
                                        int t_horizon) {
  if (t_horizon < 0) {
    throw std::invalid_argument("horizon must be nonnegative");
  }
  CovarianceSchedule out;
  out.per_step.reserve(static_cast<size_t>(t_horizon) + 1);
  Mat2 cov = Mat2::zero();
  out.per_step.push_back(cov);
  for (int t = 1; t <= t_horizon; ++t) {
    cov = a_cl * cov * a_cl.transposed() + noise.sigma();
    out.per_step.push_back(cov);
  }
  return out;
}

double margin_coefficient(Vec2 face_normal, const Mat2& cov, bool root_two) {
  double q = cov.quadratic_form(face_normal);
  if (q < 0.0) {
    g_margin_clamps.fetch_add(1, std::memory_order_relaxed);
    q = 0.0;
  }
  return std::sqrt((root_two ? 2.0 : 1.0) * q);
}

std::uint64_t margin_clamp_count() {
  return g_margin_clamps.load(std::memory_order_relaxed);
}

double risk_from_margin(double s) { return 0.5 * (1.0 - erf(s)); }

}  // namespace pathgames
