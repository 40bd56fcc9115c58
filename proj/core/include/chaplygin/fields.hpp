#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chaplygin/geometry.hpp"
#include "chaplygin/types.hpp"

namespace chaplygin::fields {

using geometry::BoundarySide;
using geometry::Domain;
using geometry::Mesh;

/// Pointwise derived state for a value/gradient pair at xi:
/// chi = phi - Dphi.xi, c^2 = |Dphi|^2 + chi^2 - 1, the pseudo-Mach number
/// L^2 = 1 + (1 - phi^2/(1+|xi|^2))/c^2 and the Chaplygin density
/// rho = sqrt(A)/c. L2 and rho are NaN (and `subsonic` set) when c^2 <= 0.
struct StateDerived {
  double chi = 0.0;
  double c2 = 0.0;
  double L2 = 0.0;
  double rho = 0.0;
  bool subsonic = false;
  std::optional<double> pressure;  // A(1/rho_star - 1/rho), only if rho_star given
};

StateDerived derived_state(double phi, Vec2 grad, Vec2 xi, double A,
                           std::optional<double> rho_star = std::nullopt);

/// Residual of the mu-family interior equation
///   c^2 (Lap phi + D^2 phi[xi,xi]) - mu D^2 phi[w,w],  w = Dphi - chi xi.
/// mu = 1 is the full conical potential equation.
double interior_residual(double mu, double phi, Vec2 grad, const Sym2& hess, Vec2 xi);

struct PrincipalPart {
  Sym2 a;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

/// Coefficient matrix a = c^2 (I + xi xi^T) - mu w w^T of the second-order
/// part, with its eigenvalues. At mu = 1 the smallest eigenvalue is positive
/// exactly when L < 1 (det a = c^4 (1+|xi|^2)(1 - L^2)).
PrincipalPart principal_coefficients(double mu, double phi, Vec2 grad, Vec2 xi);

/// Residual of the (eps-lifted) boundary conditions on the named side.
/// Throws PointOffBoundary if xi violates the side's defining equation
/// beyond 1e-10.
double boundary_residual(BoundarySide side, double eps, double phi, Vec2 grad,
                         Vec2 xi, const Domain& domain);

/// |nu_py|^2 + tan^2(sigma2): the constant value of
/// (nu_py - tan(sigma2) xi) . nu_py along Gamma_py. Strictly positive, which
/// is the obliqueness of the wing-edge condition.
double obliqueness(const Domain& domain);

struct LinearState {
  double phi = 0.0;
  Vec2 grad;
  double chi = 0.0;
  double c2 = 0.0;
};

/// The exact linear solution phi^eta(xi) = eta1 xi1 + eta2 xi2 + eta3.
/// Throws InadmissibleEta unless |eta|^2 > 1.
LinearState linear_exact(Vec3 eta, Vec2 xi);

enum class EtaClass { super, sub, neither };

/// Classify eta against the sampled inequalities that the comparison
/// principle consumes: cone-trace of psi^eta = eta.x/|x| against 1+eps and
/// the sign of the outward normal derivative of psi^eta on the three
/// non-degenerate boundary pieces.
EtaClass classify_eta(Vec3 eta, const Domain& domain, double eps, int n_samples = 256);

struct EnvelopeResult {
  ScalarField lower;
  ScalarField upper;
  double delta0 = 0.0;  // min over the interior band of lower/sqrt(1+|xi|^2) - (1+eps)
  int n_sub = 0;
  int n_super = 0;
};

/// Nodal sub/super-solution envelopes: lower = max over sub eta of phi^eta,
/// upper = min over super eta of phi^eta. Throws EmptyFamily if either class
/// is empty after classification. The interior band for delta0 is mapped
/// distance >= 0.1 from the cone edge.
EnvelopeResult envelope(const Domain& domain, double eps, std::span<const Vec3> eta_family,
                        const Mesh& mesh);

/// Default eta family: 81 sub vectors built on a 9x9 grid of interior
/// directions with amplitudes (1+eps)(1-1e-3)/cos(angular distance to the
/// Mach circle), plus the 6 super vectors (delta, -delta, M) with
/// delta in {0.05, 0.1, 0.2} and M in {2 v3inf, 4 v3inf}.
std::vector<Vec3> default_eta_family(const Domain& domain, double eps);

enum class STransform { to_s, from_s };

/// phi = sqrt(1+|xi|^2) cosh(s). to_s requires phi > sqrt(1+|xi|^2) and
/// throws DegenerateValue otherwise.
double s_transform(double value, Vec2 xi, STransform direction);

/// Residual of the s-form interior equation with
/// n = (1+|xi|^2)(|Ds|^2 + |Ds.xi|^2):
///   (1+n)(Lap s + D^2 s[xi,xi])
///   - mu (1+|xi|^2) D^2 s[m,m],  m = Ds + (Ds.xi) xi,
///   + 2 (1+(1-mu) n) Ds.xi
///   + (2+(1-mu) n)(1+n) / ((1+|xi|^2) tanh s).
/// Throws DegenerateValue if s <= 0.
double s_interior_residual(double mu, double s, Vec2 grad_s, const Sym2& hess_s, Vec2 xi);

struct Spherical {
  double theta = 0.0;    // arccos(x1/r) with x = (xi1, xi2, 1)
  double azimuth = 0.0;  // angle of (x2, x3)
  double psi = 0.0;      // phi / sqrt(1+|xi|^2)
};

Spherical spherical_lift(Vec2 xi, double phi);

struct LiftedPoint {
  Vec2 xi;
  double phi = 0.0;
};

LiftedPoint spherical_lift_inverse(const Spherical& s);

struct HatState {
  Vec2 xi_hat;
  double phi_hat = 0.0;
};

/// Rotation by sigma2 about the x2-axis followed by the conical rescaling;
/// maps P3 to the origin of the hat coordinates. The inverse is
/// hat_transform(.., -sigma2). Throws BehindApex if the rotated x3 <= 0.
HatState hat_transform(Vec2 xi, double phi, double sigma2);

/// D(L^2) from the simplified identity
///   D(L^2) = (Dc^2/c^2)(1-L^2) - [(1+|xi|^2) D(phi^2) - phi^2 D(|xi|^2)]
///            / ((1+|xi|^2)^2 c^2),
/// with Dc^2 = 2 H (Dphi - chi xi). Throws SubsonicState if c^2 <= 0.
Vec2 grad_L2(double phi, Vec2 grad, const Sym2& hess, Vec2 xi);

/// Characteristic form Q(kappa) = c^2 - |gradPhi . kappa|^2 of the 3-D
/// potential equation, c^2 = |gradPhi|^2 - 1. Throws NotUnit if |kappa|
/// deviates from 1 beyond 1e-12.
double characteristic_form(Vec3 kappa, Vec3 grad_phi);

}  // namespace chaplygin::fields
