#include "chaplygin/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chaplygin/errors.hpp"

namespace chaplygin::fields {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec3 lift_dir(Vec2 xi) {
  const Vec3 x{xi.x1, xi.x2, 1.0};
  return (1.0 / norm(x)) * x;
}
}  // namespace

StateDerived derived_state(double phi, Vec2 grad, Vec2 xi, double A,
                           std::optional<double> rho_star) {
  StateDerived s;
  s.chi = phi - dot(grad, xi);
  s.c2 = norm2(grad) + s.chi * s.chi - 1.0;
  if (s.c2 > 0.0) {
    s.L2 = 1.0 + (1.0 - phi * phi / (1.0 + norm2(xi))) / s.c2;
    s.rho = std::sqrt(A) / std::sqrt(s.c2);
    if (rho_star) s.pressure = A * (1.0 / *rho_star - 1.0 / s.rho);
  } else {
    s.subsonic = true;
    s.L2 = kNaN;
    s.rho = kNaN;
  }
  return s;
}

double interior_residual(double mu, double phi, Vec2 grad, const Sym2& hess, Vec2 xi) {
  const double chi = phi - dot(grad, xi);
  const double c2 = norm2(grad) + chi * chi - 1.0;
  const Vec2 w = grad - chi * xi;
  return c2 * (hess.trace() + hess.quadratic(xi)) - mu * hess.quadratic(w);
}

PrincipalPart principal_coefficients(double mu, double phi, Vec2 grad, Vec2 xi) {
  const double chi = phi - dot(grad, xi);
  const double c2 = norm2(grad) + chi * chi - 1.0;
  const Vec2 w = grad - chi * xi;
  PrincipalPart p;
  p.a.a11 = c2 * (1.0 + xi.x1 * xi.x1) - mu * w.x1 * w.x1;
  p.a.a12 = c2 * xi.x1 * xi.x2 - mu * w.x1 * w.x2;
  p.a.a22 = c2 * (1.0 + xi.x2 * xi.x2) - mu * w.x2 * w.x2;
  const double mean = 0.5 * (p.a.a11 + p.a.a22);
  const double disc = std::hypot(0.5 * (p.a.a11 - p.a.a22), p.a.a12);
  p.eig_min = mean - disc;
  p.eig_max = mean + disc;
  return p;
}

double boundary_residual(BoundarySide side, double eps, double phi, Vec2 grad, Vec2 xi,
                         const Domain& domain) {
  constexpr double tol = 1e-10;
  double off = 0.0;
  switch (side) {
    case BoundarySide::cone:
      off = std::abs(norm2(xi) - domain.mach_radius * domain.mach_radius);
      break;
    case BoundarySide::py:
      off = std::abs(dot(xi, domain.nu_py) + domain.py_line[2]);
      break;
    case BoundarySide::sy1:
      off = std::abs(xi.x1);
      break;
    case BoundarySide::sy2:
      off = std::abs(xi.x2);
      break;
  }
  if (off > tol) {
    std::ostringstream os;
    os << "point (" << xi.x1 << ", " << xi.x2 << ") misses the boundary by " << off;
    throw Error(ErrorCode::PointOffBoundary, os.str());
  }

  switch (side) {
    case BoundarySide::cone:
      return phi - std::sqrt(1.0 + norm2(xi)) - eps;
    case BoundarySide::py: {
      const double chi = phi - dot(grad, xi);
      return dot(grad, domain.nu_py) + chi * std::tan(domain.sigma2);
    }
    case BoundarySide::sy1:
      return dot(grad, domain.nu_sy1);
    case BoundarySide::sy2:
      return dot(grad, domain.nu_sy2);
  }
  throw Error(ErrorCode::BadParameter, "unknown boundary side");
}

double obliqueness(const Domain& domain) {
  const double t2 = std::tan(domain.sigma2);
  return norm2(domain.nu_py) + t2 * t2;
}

LinearState linear_exact(Vec3 eta, Vec2 xi) {
  if (!(norm2(eta) > 1.0)) {
    std::ostringstream os;
    os << "|eta|^2 = " << norm2(eta) << " must exceed 1";
    throw Error(ErrorCode::InadmissibleEta, os.str());
  }
  LinearState s;
  s.phi = eta.x1 * xi.x1 + eta.x2 * xi.x2 + eta.x3;
  s.grad = {eta.x1, eta.x2};
  s.chi = eta.x3;
  s.c2 = norm2(eta) - 1.0;
  return s;
}

namespace {

// In-sphere outward conormal of a boundary piece at the unit direction u.
// All three pieces lie in planes through the origin, so the projection of
// the plane normal onto the tangent space of the sphere is the conormal.
Vec3 sphere_conormal(Vec3 plane_normal, Vec3 u) {
  const Vec3 t = plane_normal - dot(plane_normal, u) * u;
  const double n = norm(t);
  return (1.0 / n) * t;
}

}  // namespace

EtaClass classify_eta(Vec3 eta, const Domain& domain, double eps, int n_samples) {
  if (!(norm2(eta) > 1.0))
    throw Error(ErrorCode::InadmissibleEta, "classification needs |eta|^2 > 1");
  if (n_samples < 16)
    throw Error(ErrorCode::BadParameter, "classification needs at least 16 samples per piece");

  const double cot1 = 1.0 / std::tan(domain.sigma1);
  const double tan2 = std::tan(domain.sigma2);
  const Vec3 n_w{1.0, -cot1 * tan2, tan2};
  const Vec3 n_sy1{1.0, 0.0, 0.0};
  const Vec3 n_sy2{0.0, -1.0, 0.0};

  bool above_cone = true;   // psi^eta > 1+eps at every cone sample
  bool below_cone = true;   // psi^eta < 1+eps at every cone sample
  for (int k = 0; k < n_samples; ++k) {
    const double t = (k + 1.0) / (n_samples + 1.0);
    const Vec3 u = lift_dir(geometry::boundary_point(domain, BoundarySide::cone, t));
    const double psi = dot(eta, u);
    if (!(psi > 1.0 + eps)) above_cone = false;
    if (!(psi < 1.0 + eps)) below_cone = false;
    if (!above_cone && !below_cone) break;
  }

  bool deriv_pos = true;
  bool deriv_neg = true;
  const struct {
    BoundarySide side;
    Vec3 normal;
  } pieces[] = {{BoundarySide::py, n_w}, {BoundarySide::sy1, n_sy1}, {BoundarySide::sy2, n_sy2}};
  for (const auto& piece : pieces) {
    for (int k = 0; k < n_samples; ++k) {
      const double t = (k + 1.0) / (n_samples + 1.0);
      const Vec3 u = lift_dir(geometry::boundary_point(domain, piece.side, t));
      const Vec3 conormal = sphere_conormal(piece.normal, u);
      const Vec3 surf_grad = eta - dot(eta, u) * u;
      const double d = dot(surf_grad, conormal);
      if (!(d > 0.0)) deriv_pos = false;
      if (!(d < 0.0)) deriv_neg = false;
      if (!deriv_pos && !deriv_neg) break;
    }
    if (!deriv_pos && !deriv_neg) break;
  }

  if (above_cone && deriv_pos) return EtaClass::super;
  if (below_cone && deriv_neg) return EtaClass::sub;
  return EtaClass::neither;
}

EnvelopeResult envelope(const Domain& domain, double eps, std::span<const Vec3> eta_family,
                        const Mesh& mesh) {
  std::vector<Vec3> subs, supers;
  for (const Vec3& eta : eta_family) {
    switch (classify_eta(eta, domain, eps)) {
      case EtaClass::sub: subs.push_back(eta); break;
      case EtaClass::super: supers.push_back(eta); break;
      case EtaClass::neither: break;
    }
  }
  if (subs.empty() || supers.empty()) {
    std::ostringstream os;
    os << "after classification: " << subs.size() << " sub and " << supers.size()
       << " super vectors";
    throw Error(ErrorCode::EmptyFamily, os.str());
  }

  EnvelopeResult r;
  r.n_sub = static_cast<int>(subs.size());
  r.n_super = static_cast<int>(supers.size());
  r.lower = ScalarField(mesh.n_u, mesh.n_v);
  r.upper = ScalarField(mesh.n_u, mesh.n_v);
  r.lower.eps = eps;
  r.upper.eps = eps;
  r.delta0 = std::numeric_limits<double>::infinity();

  // Interior band for the strict lower margin: mapped distance >= 0.1 from
  // the degenerate cone edge.
  const int band_max_i = static_cast<int>(std::floor(0.9 * (mesh.n_u - 1) + 1e-9));

  for (int j = 0; j < mesh.n_v; ++j) {
    for (int i = 0; i < mesh.n_u; ++i) {
      const Vec2 xi = mesh.node(i, j);
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (const Vec3& eta : subs)
        lo = std::max(lo, eta.x1 * xi.x1 + eta.x2 * xi.x2 + eta.x3);
      for (const Vec3& eta : supers)
        hi = std::min(hi, eta.x1 * xi.x1 + eta.x2 * xi.x2 + eta.x3);
      r.lower.at(i, j) = lo;
      r.upper.at(i, j) = hi;
      if (i <= band_max_i) {
        const double margin = lo / std::sqrt(1.0 + norm2(xi)) - (1.0 + eps);
        r.delta0 = std::min(r.delta0, margin);
      }
    }
  }
  return r;
}

std::vector<Vec3> default_eta_family(const Domain& domain, double eps) {
  std::vector<Vec3> family;

  // Sub vectors: directions through a 9x9 grid of interior points, each with
  // the largest amplitude that keeps its cone trace below 1+eps by the
  // relative margin tau. Realizes the construction behind the strict
  // interior lower bound.
  const double tau = 1e-3;
  const double sigma_inf = std::atan(domain.mach_radius);
  const Mesh coarse = geometry::build_mesh(domain, 11, 11);
  for (int j = 1; j <= 9; ++j) {
    for (int i = 1; i <= 9; ++i) {
      const Vec2 xi = coarse.node(i, j);
      const double gamma = std::atan(norm(xi));
      const double dist = sigma_inf - gamma;
      if (!(dist > 0.0)) continue;
      const double amp = (1.0 + eps) * (1.0 - tau) / std::cos(dist);
      family.push_back(amp * lift_dir(xi));
    }
  }

  // Super vectors per the tilted-constant family.
  for (double delta : {0.05, 0.1, 0.2})
    for (double m : {2.0 * domain.v3inf, 4.0 * domain.v3inf})
      family.push_back({delta, -delta, m});

  return family;
}

double s_transform(double value, Vec2 xi, STransform direction) {
  const double r = std::sqrt(1.0 + norm2(xi));
  if (direction == STransform::from_s) return r * std::cosh(value);
  if (!(value > r)) {
    std::ostringstream os;
    os << "phi = " << value << " must exceed sqrt(1+|xi|^2) = " << r;
    throw Error(ErrorCode::DegenerateValue, os.str());
  }
  return std::acosh(value / r);
}

double s_interior_residual(double mu, double s, Vec2 grad_s, const Sym2& hess_s, Vec2 xi) {
  if (!(s > 0.0)) throw Error(ErrorCode::DegenerateValue, "s must be positive");
  const double r2 = 1.0 + norm2(xi);
  const double ds_xi = dot(grad_s, xi);
  const double n = r2 * (norm2(grad_s) + ds_xi * ds_xi);
  const Vec2 m = grad_s + ds_xi * xi;
  return (1.0 + n) * (hess_s.trace() + hess_s.quadratic(xi)) - mu * r2 * hess_s.quadratic(m) +
         2.0 * (1.0 + (1.0 - mu) * n) * ds_xi +
         (2.0 + (1.0 - mu) * n) * (1.0 + n) / (r2 * std::tanh(s));
}

Spherical spherical_lift(Vec2 xi, double phi) {
  const double r = std::sqrt(1.0 + norm2(xi));
  Spherical s;
  s.theta = std::acos(xi.x1 / r);
  s.azimuth = std::atan2(1.0, xi.x2);
  s.psi = phi / r;
  return s;
}

LiftedPoint spherical_lift_inverse(const Spherical& s) {
  const double st = std::sin(s.theta);
  const Vec3 u{std::cos(s.theta), st * std::cos(s.azimuth), st * std::sin(s.azimuth)};
  if (!(u.x3 > 0.0))
    throw Error(ErrorCode::BadParameter, "direction does not cross the plane x3 = 1");
  LiftedPoint p;
  p.xi = {u.x1 / u.x3, u.x2 / u.x3};
  p.phi = s.psi * std::sqrt(1.0 + norm2(p.xi));
  return p;
}

HatState hat_transform(Vec2 xi, double phi, double sigma2) {
  const double c = std::cos(sigma2), s = std::sin(sigma2);
  const double x1h = xi.x1 * c + s;
  const double x3h = -xi.x1 * s + c;
  if (!(x3h > 0.0)) {
    std::ostringstream os;
    os << "rotated height " << x3h << " is not positive";
    throw Error(ErrorCode::BehindApex, os.str());
  }
  HatState h;
  h.xi_hat = {x1h / x3h, xi.x2 / x3h};
  h.phi_hat = phi / x3h;
  return h;
}

Vec2 grad_L2(double phi, Vec2 grad, const Sym2& hess, Vec2 xi) {
  const double chi = phi - dot(grad, xi);
  const double c2 = norm2(grad) + chi * chi - 1.0;
  if (!(c2 > 0.0)) throw Error(ErrorCode::SubsonicState, "c^2 <= 0, L^2 undefined");
  const double r2 = 1.0 + norm2(xi);
  const double L2 = 1.0 + (1.0 - phi * phi / r2) / c2;
  const Vec2 w = grad - chi * xi;
  const Vec2 dc2 = 2.0 * hess.apply(w);
  const Vec2 bracket = (2.0 * phi * r2) * grad - (2.0 * phi * phi) * xi;
  return ((1.0 - L2) / c2) * dc2 - (1.0 / (r2 * r2 * c2)) * bracket;
}

double characteristic_form(Vec3 kappa, Vec3 grad_phi) {
  if (std::abs(norm(kappa) - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "|kappa| = " << norm(kappa) << " deviates from 1";
    throw Error(ErrorCode::NotUnit, os.str());
  }
  const double c2 = norm2(grad_phi) - 1.0;
  const double proj = dot(grad_phi, kappa);
  return c2 - proj * proj;
}

}  // namespace chaplygin::fields
