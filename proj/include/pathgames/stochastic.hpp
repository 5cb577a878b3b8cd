#pragma once

#include <cstdint>
#include <vector>

#include "pathgames/vec2.hpp"

namespace pathgames {

// Zero-mean Gaussian process noise with a symmetric PSD covariance.
class NoiseModel {
 public:
  NoiseModel() : sigma_(Mat2::zero()) {}
  explicit NoiseModel(Mat2 sigma);

  static NoiseModel isotropic(double variance);

  const Mat2& sigma() const { return sigma_; }
  bool is_zero() const { return sigma_ == Mat2::zero(); }

  // Lower-triangular factor L with L L^T = sigma (PSD-safe).
  Mat2 cholesky_factor() const;

 private:
  Mat2 sigma_;
};

// Position covariance per step, t = 0..horizon. Entry 0 is always zero.
struct CovarianceSchedule {
  std::vector<Mat2> per_step;

  const Mat2& at(int t) const { return per_step.at(static_cast<size_t>(t)); }
  int horizon() const { return static_cast<int>(per_step.size()) - 1; }
};

// Error function, |error| <= 1e-12 on [-6, 6]; odd by construction.
double erf(double x);

// Inverse on (-1, 1): rational first guess plus Newton refinement so that
// erf(erf_inv(y)) = y within 1e-10. Throws std::domain_error for |y| >= 1.
double erf_inv(double y);

// A - k*B: the state matrix seen by the noise once the per-step control
// includes a correction k*(planned - observed). k = 0 is pure open loop.
Mat2 closed_loop_matrix(const Mat2& A, const Mat2& B, double k);

// Sigma_t = sum_{j=0}^{t-1} A_cl^j Sigma (A_cl^T)^j, Sigma_0 = 0.
CovarianceSchedule propagate_covariance(const Mat2& a_cl,
                                        const NoiseModel& noise,
                                        int t_horizon);

// sqrt(2 a^T cov a) for a unit face normal; the factor multiplying the
// margin variable in every chance constraint. `root_two=false` drops the
// sqrt(2) for comparisons against the uncorrected convention.
double margin_coefficient(Vec2 face_normal, const Mat2& cov,
                          bool root_two = true);

// Count of negative quadratic forms clamped to zero by margin_coefficient
// since process start (numerical diagnostics only).
std::uint64_t margin_clamp_count();

// g = (1 - erf(s)) / 2: one-sided Gaussian tail bound behind a margin s.
double risk_from_margin(double s);

}  // namespace pathgames
