#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace chaplygin {

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

struct Vec3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x1, s * a.x2, s * a.x3}; }
inline double dot(Vec3 a, Vec3 b) { return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3; }
inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }

/// Symmetric 2x2 matrix, used for Hessians and principal parts.
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  double trace() const { return a11 + a22; }
  /// a^T M b
  double bilinear(Vec2 a, Vec2 b) const {
    return a11 * a.x1 * b.x1 + a12 * (a.x1 * b.x2 + a.x2 * b.x1) + a22 * a.x2 * b.x2;
  }
  double quadratic(Vec2 a) const { return bilinear(a, a); }
  Vec2 apply(Vec2 v) const { return {a11 * v.x1 + a12 * v.x2, a12 * v.x1 + a22 * v.x2}; }
};

/// Nodal values of phi (or s, or psi) on a structured (n_u x n_v) mesh,
/// together with the (mu, eps) pair it solves when it is a solution field.
struct ScalarField {
  int n_u = 0;
  int n_v = 0;
  std::vector<double> values;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();

  ScalarField() = default;
  ScalarField(int nu, int nv, double fill = 0.0)
      : n_u(nu), n_v(nv), values(static_cast<size_t>(nu) * nv, fill) {}

  int size() const { return n_u * n_v; }
  int idx(int i, int j) const { return i + n_u * j; }
  double& at(int i, int j) { return values[idx(i, j)]; }
  double at(int i, int j) const { return values[idx(i, j)]; }
};

enum class JacobianMode { analytic, colored_difference };

struct NewtonOptions {
  double tol = 1e-8;          // residual sup-norm target
  int max_iter = 30;          // per-(mu,eps) Newton cap
  int max_backtracks = 8;     // line-search halvings cap
  JacobianMode jacobian_mode = JacobianMode::analytic;
};

}  // namespace chaplygin
