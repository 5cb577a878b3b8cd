#pragma once

#include <cmath>

namespace pathgames {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  // z-component of the 3D cross product; positive when o is CCW from *this.
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double norm_inf() const {
    double ax = x < 0 ? -x : x;
    double ay = y < 0 ? -y : y;
    return ax > ay ? ax : ay;
  }
  constexpr double norm1() const { return (x < 0 ? -x : x) + (y < 0 ? -y : y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

// Dense 2x2 matrix, row-major.
struct Mat2 {
  double a = 0.0, b = 0.0;  // row 0
  double c = 0.0, d = 0.0;  // row 1

  constexpr Mat2() = default;
  constexpr Mat2(double a_, double b_, double c_, double d_)
      : a(a_), b(b_), c(c_), d(d_) {}

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }
  static constexpr Mat2 diagonal(double dx, double dy) {
    return {dx, 0.0, 0.0, dy};
  }
  static constexpr Mat2 scale(double s) { return {s, 0.0, 0.0, s}; }

  constexpr Vec2 operator*(Vec2 v) const {
    return {a * v.x + b * v.y, c * v.x + d * v.y};
  }
  constexpr Mat2 operator*(Mat2 o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
  constexpr Mat2 operator+(Mat2 o) const {
    return {a + o.a, b + o.b, c + o.c, d + o.d};
  }
  constexpr Mat2 operator-(Mat2 o) const {
    return {a - o.a, b - o.b, c - o.c, d - o.d};
  }
  constexpr Mat2 operator*(double s) const {
    return {a * s, b * s, c * s, d * s};
  }
  constexpr bool operator==(const Mat2&) const = default;

  constexpr Mat2 transposed() const { return {a, c, b, d}; }
  constexpr double trace() const { return a + d; }
  constexpr double det() const { return a * d - b * c; }

  // x^T M x
  constexpr double quadratic_form(Vec2 v) const {
    return v.x * (a * v.x + b * v.y) + v.y * (c * v.x + d * v.y);
  }

  bool is_symmetric(double tol = 1e-12) const { return std::abs(b - c) <= tol; }

  // Eigenvalues of a symmetric 2x2 (ascending).
  void symmetric_eigenvalues(double& lo, double& hi) const {
    double mean = 0.5 * (a + d);
    double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + b * c));
    lo = mean - disc;
    hi = mean + disc;
  }

  double spectral_radius() const {
    // General 2x2: |eigenvalues| via the characteristic polynomial.
    double tr = trace(), de = det();
    double disc = 0.25 * tr * tr - de;
    if (disc >= 0.0) {
      double r = std::sqrt(disc);
      return std::max(std::abs(0.5 * tr + r), std::abs(0.5 * tr - r));
    }
    return std::sqrt(de);  // complex pair, |lambda|^2 = det
  }
};

constexpr Mat2 operator*(double s, Mat2 m) { return m * s; }

}  // namespace pathgames
