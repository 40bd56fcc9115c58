#pragma once

#include <array>
#include <vector>

#include "chaplygin/config.hpp"
#include "chaplygin/types.hpp"

namespace chaplygin::geometry {

/// Half of the vertex angle of the freestream Mach cone,
/// sigma_inf = arcsin(sqrt(v^2-1)/v). Throws NonSupersonic for v <= 1.
double critical_angle(double v3inf);

enum class BoundarySide { cone, py, sy1, sy2 };

enum class BoundaryTag : unsigned char {
  interior,
  cone,
  py,
  sy1,
  sy2,
  corner_p1,
  corner_p2,
  corner_p3,
  corner_p4,
};

/// The self-similar region Omega in conical xi-coordinates, bounded by the
/// Mach-circle arc P2->P1, the wing edge P3->P4 and the two symmetry
/// segments P3->P2 (xi2 = 0) and P4->P1 (xi1 = 0).
struct Domain {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double v3inf = 0.0;
  double mach_radius = 0.0;  // R_inf = sqrt(v3inf^2 - 1)
  Vec2 p1, p2, p3, p4;
  Vec2 nu_py, nu_sy1, nu_sy2;        // 2-D exterior normals
  std::array<double, 3> py_line{};   // a*xi1 + b*xi2 + c = 0 on Gamma_py
};

Domain build_domain(const ProblemConfig& config);
Domain build_domain(double sigma1, double sigma2, double v3inf);

/// Parameterization of the four boundary pieces, t in [0,1], endpoints exact:
/// cone: P2 -> P1 along the Mach circle; py: P3 -> P4; sy2: P3 -> P2;
/// sy1: P4 -> P1.
Vec2 boundary_point(const Domain& domain, BoundarySide side, double t);

/// Sign test against all four boundary pieces with 1e-12 tolerance.
bool contains(const Domain& domain, Vec2 xi);

/// Per-node first derivatives of the transfinite map (u,v) -> xi and of its
/// inverse. `jac` is the orientation-normalized Jacobian determinant (the
/// spec's corner convention makes the raw det of [x_u x_v] negative, so the
/// stored value is det times the domain orientation; folded cells show up as
/// jac <= 0 either way).
struct MeshMetrics {
  Vec2 x_u, x_v;      // d(xi)/du, d(xi)/dv
  Vec2 grad_u, grad_v;  // du/d(xi), dv/d(xi)
  double jac = 0.0;
};

/// Boundary-fitted structured grid over Omega from transfinite interpolation
/// of the four boundary curves. Edges: u=0 -> Gamma_py, u=1 -> Gamma_cone,
/// v=0 -> Gamma_sy2, v=1 -> Gamma_sy1; corners (0,0)->P3, (1,0)->P2,
/// (0,1)->P4, (1,1)->P1.
struct Mesh {
  int n_u = 0;
  int n_v = 0;
  double h_u = 0.0;
  double h_v = 0.0;
  Domain domain;
  std::vector<Vec2> nodes;
  std::vector<MeshMetrics> metrics;
  std::vector<BoundaryTag> tags;

  int size() const { return n_u * n_v; }
  int idx(int i, int j) const { return i + n_u * j; }
  Vec2 node(int i, int j) const { return nodes[idx(i, j)]; }
  BoundaryTag tag(int i, int j) const { return tags[idx(i, j)]; }
  /// Largest mapped grid spacing; the h used by discrete-slack checks.
  double h() const { return h_u > h_v ? h_u : h_v; }
};

Mesh build_mesh(const Domain& domain, int n_u, int n_v);

/// True for cone nodes and the cone-side corners P1, P2.
inline bool on_cone(BoundaryTag t) {
  return t == BoundaryTag::cone || t == BoundaryTag::corner_p1 || t == BoundaryTag::corner_p2;
}
/// True for wing-edge nodes and the wing-side corners P3, P4.
inline bool on_py(BoundaryTag t) {
  return t == BoundaryTag::py || t == BoundaryTag::corner_p3 || t == BoundaryTag::corner_p4;
}

/// n points on the shock surface slice {v^2 x3^2 = |x|^2, x3 = 1, x1 <= 0,
/// x2 >= 0}; for the Chaplygin gas this cone is the detached shock front.
std::vector<Vec3> shock_cone_sample(const ProblemConfig& config, int n);

}  // namespace chaplygin::geometry
