#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chaplygin/diagnostics.hpp"
#include "chaplygin/errors.hpp"

namespace chaplygin::diagnostics {

namespace {

using geometry::BoundarySide;
using geometry::Domain;

double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform(rng);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

CheckRecord make(const std::string& name, bool pass, double measured, double threshold,
                 const std::string& detail) {
  CheckRecord r;
  r.name = name;
  r.pass = pass;
  r.measured = measured;
  r.threshold = threshold;
  r.detail = detail;
  return r;
}

Vec2 random_interior_point(std::mt19937_64& rng, const Domain& d) {
  for (;;) {
    Vec2 xi{uniform(rng, -d.mach_radius, 0.0), uniform(rng, 0.0, d.mach_radius)};
    if (!geometry::contains(d, xi)) continue;
    if (xi.x1 > -1e-3 || xi.x2 < 1e-3) continue;
    if (norm(xi) > d.mach_radius - 1e-3) continue;
    if (dot(xi, d.nu_py) + d.py_line[2] > -1e-3) continue;
    return xi;
  }
}

// Manufactured field with analytic derivatives for the D(L^2) oracle.
struct Manufactured {
  double base, amp, cx, cy, mix;
  double phi(Vec2 xi) const {
    return base + amp * std::sin(cx * xi.x1) * std::cos(cy * xi.x2) + mix * xi.x1 * xi.x2;
  }
  Vec2 grad(Vec2 xi) const {
    return {amp * cx * std::cos(cx * xi.x1) * std::cos(cy * xi.x2) + mix * xi.x2,
            -amp * cy * std::sin(cx * xi.x1) * std::sin(cy * xi.x2) + mix * xi.x1};
  }
  Sym2 hess(Vec2 xi) const {
    Sym2 h;
    h.a11 = -amp * cx * cx * std::sin(cx * xi.x1) * std::cos(cy * xi.x2);
    h.a12 = -amp * cx * cy * std::cos(cx * xi.x1) * std::sin(cy * xi.x2) + mix;
    h.a22 = -amp * cy * cy * std::sin(cx * xi.x1) * std::cos(cy * xi.x2);
    return h;
  }
  double L2(Vec2 xi) const {
    return fields::derived_state(phi(xi), grad(xi), xi, 1.0).L2;
  }
};

}  // namespace

std::vector<CheckRecord> verify_closed_form(const ProblemConfig& config, unsigned long long seed,
                                            const VerifyHooks& hooks) {
  std::vector<CheckRecord> out;
  const Domain domain = geometry::build_domain(config);
  std::mt19937_64 rng(seed);

  // Critical angle: value plus the defining identity v sin(sigma_inf) =
  // sqrt(v^2 - 1).
  {
    const double s = geometry::critical_angle(config.v3inf);
    const double gap =
        std::abs(config.v3inf * std::sin(s) - std::sqrt(config.v3inf * config.v3inf - 1.0));
    out.push_back(make("critical_angle", gap <= 1e-13, gap, 1e-13,
                       "sigma_inf = " + fmt(s) + " rad"));
  }

  // Domain invariants: corners on their curves, wing inside the Mach circle,
  // stated normals, boundary parameterizations on their defining equations.
  {
    double worst = 0.0;
    const double r = domain.mach_radius;
    worst = std::max(worst, std::abs(norm(domain.p1) - r));
    worst = std::max(worst, std::abs(norm(domain.p2) - r));
    auto line = [&domain](Vec2 xi) { return dot(xi, domain.nu_py) + domain.py_line[2]; };
    worst = std::max(worst, std::abs(line(domain.p3)));
    worst = std::max(worst, std::abs(line(domain.p4)));
    for (int k = 0; k < 100; ++k) {
      const double t = (k + 0.5) / 100.0;
      worst = std::max(worst,
                       std::abs(norm(geometry::boundary_point(domain, BoundarySide::cone, t)) - r));
      worst = std::max(worst,
                       std::abs(line(geometry::boundary_point(domain, BoundarySide::py, t))));
    }
    bool inside = norm(domain.p3) < r && norm(domain.p4) < r;
    for (Vec2 c : {domain.p1, domain.p2, domain.p3, domain.p4})
      inside = inside && geometry::contains(domain, c);
    out.push_back(make("domain_invariants", inside && worst <= 1e-13, worst, 1e-13,
                       "corner/boundary equation residuals"));
  }

  // Exact linear solutions annihilate the interior kernel for every mu.
  {
    auto kernel = hooks.interior_residual;
    if (!kernel)
      kernel = [](double mu, double phi, Vec2 g, const Sym2& h, Vec2 xi) {
        return fields::interior_residual(mu, phi, g, h, xi);
      };
    const int n = std::min(config.grid.n_u, 65);
    const geometry::Mesh mesh = geometry::build_mesh(domain, std::max(9, n), std::max(9, n));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Vec3 dir{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, 0.2, 1.0)};
      const double amp = std::sqrt(uniform(rng, 1.1, 25.0)) / norm(dir);
      const Vec3 eta = amp * dir;
      for (double mu : {0.0, 0.5, 1.0})
        for (int k = 0; k < mesh.size(); ++k) {
          const auto lin = fields::linear_exact(eta, mesh.nodes[k]);
          worst = std::max(worst,
                           std::abs(kernel(mu, lin.phi, lin.grad, Sym2{}, mesh.nodes[k])));
        }
    }
    out.push_back(make("exact_solution_annihilation", worst <= 1e-11, worst, 1e-11,
                       "20 random eta, mu in {0, 0.5, 1}, " + std::to_string(mesh.size()) +
                           " nodes"));
  }

  // Transform round trips.
  {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec2 xi = random_interior_point(rng, domain);
      const double s = uniform(rng, 0.05, 1.0);
      const double phi = fields::s_transform(s, xi, fields::STransform::from_s);
      worst = std::max(worst,
                       std::abs(fields::s_transform(phi, xi, fields::STransform::to_s) - s));

      const auto sph = fields::spherical_lift(xi, phi);
      const auto back = fields::spherical_lift_inverse(sph);
      worst = std::max({worst, std::abs(back.xi.x1 - xi.x1), std::abs(back.xi.x2 - xi.x2),
                        std::abs(back.phi - phi)});

      const auto hat = fields::hat_transform(xi, phi, domain.sigma2);
      const auto unhat = fields::hat_transform(hat.xi_hat, hat.phi_hat, -domain.sigma2);
      worst = std::max({worst, std::abs(unhat.xi_hat.x1 - xi.x1),
                        std::abs(unhat.xi_hat.x2 - xi.x2), std::abs(unhat.phi_hat - phi)});
    }
    const auto p3hat = fields::hat_transform(domain.p3, 1.5, domain.sigma2);
    worst = std::max({worst, std::abs(p3hat.xi_hat.x1), std::abs(p3hat.xi_hat.x2)});
    out.push_back(make("transform_round_trips", worst <= 1e-13, worst, 1e-13,
                       "s / spherical / hat round trips, hat(P3) -> origin"));
  }

  // D(L^2) formula against centered differences of the analytic L^2 of a
  // manufactured smooth field.
  {
    const Manufactured man{config.v3inf, 0.3, 1.0, 0.7, 0.1};
    const double step = 1e-4;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Vec2 xi = random_interior_point(rng, domain);
      const Vec2 formula = fields::grad_L2(man.phi(xi), man.grad(xi), man.hess(xi), xi);
      const Vec2 fd{(man.L2({xi.x1 + step, xi.x2}) - man.L2({xi.x1 - step, xi.x2})) / (2 * step),
                    (man.L2({xi.x1, xi.x2 + step}) - man.L2({xi.x1, xi.x2 - step})) / (2 * step)};
      worst = std::max(worst, norm(formula - fd) / std::max(norm(fd), 1e-8));
    }
    out.push_back(make("grad_L2_oracle", worst <= 1e-4, worst, 1e-4,
                       "manufactured field, centered differences at step 1e-4"));
  }

  // The freestream Mach cone is characteristic: Q vanishes on its normal
  // field.
  {
    const Vec3 grad_phi{0.0, 0.0, config.v3inf};
    const double v2 = config.v3inf * config.v3inf;
    double worst = 0.0;
    for (const Vec3& x : geometry::shock_cone_sample(config, 64)) {
      Vec3 n{x.x1, x.x2, (1.0 - v2) * x.x3};
      n = (1.0 / norm(n)) * n;
      worst = std::max(worst, std::abs(fields::characteristic_form(n, grad_phi)));
    }
    out.push_back(make("characteristic_mach_cone", worst <= 1e-13, worst, 1e-13,
                       "Q on the shock-cone normal field"));
  }

  return out;
}

}  // namespace chaplygin::diagnostics
