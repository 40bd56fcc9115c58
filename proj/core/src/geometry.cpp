#include "chaplygin/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "chaplygin/errors.hpp"

namespace chaplygin::geometry {

namespace {
constexpr double kBoundaryTol = 1e-12;
}

double critical_angle(double v3inf) {
  if (!(v3inf > 1.0)) {
    std::ostringstream os;
    os << "freestream speed " << v3inf << " must exceed 1";
    throw Error(ErrorCode::NonSupersonic, os.str());
  }
  return std::asin(std::sqrt(v3inf * v3inf - 1.0) / v3inf);
}

Domain build_domain(double sigma1, double sigma2, double v3inf) {
  const double sigma_inf = critical_angle(v3inf);
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || sigma1 >= sigma_inf || sigma2 >= sigma_inf) {
    std::ostringstream os;
    os << "wing half-angles (" << sigma1 << ", " << sigma2
       << ") must lie strictly inside (0, sigma_inf = " << sigma_inf
       << "); otherwise the shock attaches to the leading edges";
    throw Error(ErrorCode::AngleTooLarge, os.str());
  }

  Domain d;
  d.sigma1 = sigma1;
  d.sigma2 = sigma2;
  d.v3inf = v3inf;
  d.mach_radius = std::sqrt(v3inf * v3inf - 1.0);
  d.p1 = {0.0, d.mach_radius};
  d.p2 = {-d.mach_radius, 0.0};
  d.p3 = {-std::tan(sigma2), 0.0};
  d.p4 = {0.0, std::tan(sigma1)};
  const double cot1 = 1.0 / std::tan(sigma1);
  d.nu_py = {1.0, -cot1 * std::tan(sigma2)};
  d.nu_sy1 = {1.0, 0.0};
  d.nu_sy2 = {0.0, -1.0};
  d.py_line = {d.nu_py.x1, d.nu_py.x2, std::tan(sigma2)};
  return d;
}

Domain build_domain(const ProblemConfig& config) {
  return build_domain(config.sigma1, config.sigma2, config.v3inf);
}

Vec2 boundary_point(const Domain& d, BoundarySide side, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "boundary parameter t = " << t << " outside [0,1]";
    throw Error(ErrorCode::BadParameter, os.str());
  }
  switch (side) {
    case BoundarySide::cone: {
      if (t == 0.0) return d.p2;
      if (t == 1.0) return d.p1;
      const double alpha = std::numbers::pi * (1.0 - 0.5 * t);
      return {d.mach_radius * std::cos(alpha), d.mach_radius * std::sin(alpha)};
    }
    case BoundarySide::py:
      if (t == 0.0) return d.p3;
      if (t == 1.0) return d.p4;
      return d.p3 + t * (d.p4 - d.p3);
    case BoundarySide::sy2:
      if (t == 0.0) return d.p3;
      if (t == 1.0) return d.p2;
      return d.p3 + t * (d.p2 - d.p3);
    case BoundarySide::sy1:
      if (t == 0.0) return d.p4;
      if (t == 1.0) return d.p1;
      return d.p4 + t * (d.p1 - d.p4);
  }
  throw Error(ErrorCode::BadParameter, "unknown boundary side");
}

bool contains(const Domain& d, Vec2 xi) {
  if (xi.x1 > kBoundaryTol) return false;
  if (xi.x2 < -kBoundaryTol) return false;
  if (norm(xi) > d.mach_radius + kBoundaryTol) return false;
  if (dot(xi, d.nu_py) + d.py_line[2] > kBoundaryTol) return false;
  return true;
}

namespace {

// Tangents of the boundary parameterizations, d(boundary_point)/dt.
Vec2 boundary_tangent(const Domain& d, BoundarySide side, double t) {
  switch (side) {
    case BoundarySide::cone: {
      const double alpha = std::numbers::pi * (1.0 - 0.5 * t);
      const double da = -0.5 * std::numbers::pi;
      return {-d.mach_radius * std::sin(alpha) * da, d.mach_radius * std::cos(alpha) * da};
    }
    case BoundarySide::py:
      return d.p4 - d.p3;
    case BoundarySide::sy2:
      return d.p2 - d.p3;
    case BoundarySide::sy1:
      return d.p1 - d.p4;
  }
  return {};
}

// Coons patch over the four boundary curves. With two straight side curves
// this collapses to the ruled blend between the wing edge and the arc, but
// the general form is kept for clarity.
Vec2 coons(const Domain& d, double u, double v) {
  const Vec2 p = boundary_point(d, BoundarySide::py, v);
  const Vec2 q = boundary_point(d, BoundarySide::cone, v);
  const Vec2 b = boundary_point(d, BoundarySide::sy2, u);
  const Vec2 t = boundary_point(d, BoundarySide::sy1, u);
  const Vec2 blend_u = (1.0 - u) * p + u * q;
  const Vec2 blend_v = (1.0 - v) * b + v * t;
  const Vec2 bilinear = (1.0 - u) * ((1.0 - v) * d.p3 + v * d.p4) +
                        u * ((1.0 - v) * d.p2 + v * d.p1);
  return blend_u + blend_v - bilinear;
}

void coons_derivatives(const Domain& d, double u, double v, Vec2& x_u, Vec2& x_v) {
  const Vec2 p = boundary_point(d, BoundarySide::py, v);
  const Vec2 q = boundary_point(d, BoundarySide::cone, v);
  const Vec2 dp = boundary_tangent(d, BoundarySide::py, v);
  const Vec2 dq = boundary_tangent(d, BoundarySide::cone, v);
  const Vec2 db = boundary_tangent(d, BoundarySide::sy2, u);
  const Vec2 dt = boundary_tangent(d, BoundarySide::sy1, u);
  x_u = q - p + (1.0 - v) * db + v * dt -
        ((1.0 - v) * (d.p2 - d.p3) + v * (d.p1 - d.p4));
  x_v = (1.0 - u) * dp + u * dq + ((1.0 - u) * (d.p4 - d.p3) + u * (d.p1 - d.p2)) -
        ((1.0 - u) * (d.p4 - d.p3) + u * (d.p1 - d.p2));
}

BoundaryTag classify_node(int i, int j, int n_u, int n_v) {
  const bool lo_u = (i == 0), hi_u = (i == n_u - 1);
  const bool lo_v = (j == 0), hi_v = (j == n_v - 1);
  if (lo_u && lo_v) return BoundaryTag::corner_p3;
  if (hi_u && lo_v) return BoundaryTag::corner_p2;
  if (lo_u && hi_v) return BoundaryTag::corner_p4;
  if (hi_u && hi_v) return BoundaryTag::corner_p1;
  if (hi_u) return BoundaryTag::cone;
  if (lo_u) return BoundaryTag::py;
  if (lo_v) return BoundaryTag::sy2;
  if (hi_v) return BoundaryTag::sy1;
  return BoundaryTag::interior;
}

}  // namespace

Mesh build_mesh(const Domain& domain, int n_u, int n_v) {
  if (n_u < 9 || n_v < 9) {
    std::ostringstream os;
    os << "mesh needs at least 9 nodes per direction, got " << n_u << " x " << n_v;
    throw Error(ErrorCode::BadParameter, os.str());
  }

  Mesh m;
  m.n_u = n_u;
  m.n_v = n_v;
  m.h_u = 1.0 / (n_u - 1);
  m.h_v = 1.0 / (n_v - 1);
  m.domain = domain;
  m.nodes.resize(static_cast<size_t>(n_u) * n_v);
  m.metrics.resize(m.nodes.size());
  m.tags.resize(m.nodes.size());

  // The spec's corner convention orients (u,v) so that det[x_u x_v] < 0;
  // normalize the stored Jacobian to the domain orientation so that folded
  // cells are exactly jac <= 0.
  double orientation = 0.0;
  for (int j = 0; j < n_v; ++j) {
    const double v = (j == n_v - 1) ? 1.0 : j * m.h_v;
    for (int i = 0; i < n_u; ++i) {
      const double u = (i == n_u - 1) ? 1.0 : i * m.h_u;
      const int k = m.idx(i, j);
      m.nodes[k] = coons(domain, u, v);
      MeshMetrics& mm = m.metrics[k];
      coons_derivatives(domain, u, v, mm.x_u, mm.x_v);
      const double det = mm.x_u.x1 * mm.x_v.x2 - mm.x_u.x2 * mm.x_v.x1;
      if (orientation == 0.0) orientation = (det > 0.0) ? 1.0 : -1.0;
      mm.jac = det * orientation;
      if (!(mm.jac > 0.0)) {
        std::ostringstream os;
        os << "folded cell at node (" << i << ", " << j << "), jac = " << mm.jac;
        throw Error(ErrorCode::FoldedMesh, os.str());
      }
      mm.grad_u = {mm.x_v.x2 / det, -mm.x_v.x1 / det};
      mm.grad_v = {-mm.x_u.x2 / det, mm.x_u.x1 / det};
      m.tags[k] = classify_node(i, j, n_u, n_v);
    }
  }
  return m;
}

std::vector<Vec3> shock_cone_sample(const ProblemConfig& config, int n) {
  if (n < 1) throw Error(ErrorCode::BadParameter, "need at least one sample");
  const double r = std::sqrt(config.v3inf * config.v3inf - 1.0);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = (n == 1) ? 0.5 : static_cast<double>(k) / (n - 1);
    if (t == 0.0) {
      pts.push_back({-r, 0.0, 1.0});
    } else if (t == 1.0) {
      pts.push_back({0.0, r, 1.0});
    } else {
      const double alpha = std::numbers::pi * (1.0 - 0.5 * t);
      pts.push_back({r * std::cos(alpha), r * std::sin(alpha), 1.0});
    }
  }
  return pts;
}

}  // namespace chaplygin::geometry
