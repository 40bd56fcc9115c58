#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chaplygin/errors.hpp"
#include "chaplygin/fields.hpp"
#include "test_support.hpp"

using namespace chaplygin;
using namespace chaplygin::fields;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

// Exact derivative transport through phi = sqrt(1+|xi|^2) cosh(s); used to
// cross-check the s-form kernel against the phi-form kernel.
struct SState {
  double s;
  Vec2 ds;
  Sym2 hs;
};

void s_to_phi(const SState& in, Vec2 xi, double& phi, Vec2& grad, Sym2& hess) {
  const double r = std::sqrt(1.0 + norm2(xi));
  const double ch = std::cosh(in.s), sh = std::sinh(in.s);
  phi = r * ch;
  grad = (ch / r) * xi + (r * sh) * in.ds;
  const double xs[2] = {xi.x1, xi.x2};
  const double ds[2] = {in.ds.x1, in.ds.x2};
  const double hs[2][2] = {{in.hs.a11, in.hs.a12}, {in.hs.a12, in.hs.a22}};
  double h[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double kron = (i == j) ? 1.0 : 0.0;
      h[i][j] = ch * (kron / r - xs[i] * xs[j] / (r * r * r)) +
                sh * (xs[j] / r * ds[i] + xs[i] / r * ds[j]) + r * ch * ds[i] * ds[j] +
                r * sh * hs[i][j];
    }
  hess = {h[0][0], h[0][1], h[1][1]};
}

}  // namespace

TEST_CASE("derived_state closed forms") {
  const auto fs = derived_state(2.0, {0.0, 0.0}, {-1.0, 0.0}, 1.0);
  CHECK(fs.chi == 2.0);
  CHECK(fs.c2 == 3.0);
  CHECK(fs.L2 == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(fs.rho == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK_FALSE(fs.subsonic);
  CHECK_FALSE(fs.pressure.has_value());

  // On the Mach circle the freestream state is exactly parabolic.
  const Vec2 on_circle{-std::sqrt(3.0), 0.0};
  CHECK(derived_state(2.0, {0.0, 0.0}, on_circle, 1.0).L2 == Approx(1.0).epsilon(1e-14));

  const auto sonic = derived_state(1.0, {0.0, 0.0}, {0.0, 0.0}, 1.0);
  CHECK(sonic.subsonic);
  CHECK(std::isnan(sonic.L2));
  CHECK(std::isnan(sonic.rho));

  // Chaplygin identity rho * c = sqrt(A).
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const double a = testsup::uniform(rng, 0.2, 5.0);
    const Vec2 g{testsup::uniform(rng, -1.0, 1.0), testsup::uniform(rng, -1.0, 1.0)};
    const double phi = testsup::uniform(rng, 1.5, 3.0);
    const auto st = derived_state(phi, g, {-0.8, 0.4}, a);
    if (!st.subsonic) CHECK(st.rho * std::sqrt(st.c2) == Approx(std::sqrt(a)).epsilon(1e-13));
  }

  const auto with_p = derived_state(2.0, {0.0, 0.0}, {-1.0, 0.0}, 1.0, 2.0);
  REQUIRE(with_p.pressure.has_value());
  CHECK(*with_p.pressure == Approx(1.0 * (0.5 - std::sqrt(3.0))).epsilon(1e-14));
}

TEST_CASE("interior_residual worked examples") {
  // Any linear field annihilates, exactly.
  CHECK(interior_residual(0.7, 1.75, {0.3, 0.1}, Sym2{}, {-1.0, 0.5}) == 0.0);

  // phi = xi1^2 + xi2^2 at xi = (-1, 0).
  const Vec2 xi{-1.0, 0.0};
  const Vec2 grad{-2.0, 0.0};
  const Sym2 hess{2.0, 0.0, 2.0};
  CHECK(interior_residual(0.0, 1.0, grad, hess, xi) == Approx(24.0).epsilon(1e-14));
  CHECK(interior_residual(1.0, 1.0, grad, hess, xi) == Approx(6.0).epsilon(1e-14));
}

TEST_CASE("principal coefficients match the second-order part") {
  // mu = 0 with c^2 = 3 at |xi| = 1: a = 3 (I + xi xi^T).
  {
    const auto p = principal_coefficients(0.0, 2.0, {0.0, 0.0}, {-1.0, 0.0});
    CHECK(p.a.a11 == Approx(6.0).epsilon(1e-14));
    CHECK(p.a.a12 == 0.0);
    CHECK(p.a.a22 == Approx(3.0).epsilon(1e-14));
    CHECK(p.eig_max == Approx(6.0).epsilon(1e-14));
    CHECK(p.eig_min == Approx(3.0).epsilon(1e-14));
  }
  // mu = 1 freestream at xi = (-1, 0): a = diag(2, 3), elliptic.
  {
    const auto p = principal_coefficients(1.0, 2.0, {0.0, 0.0}, {-1.0, 0.0});
    CHECK(p.a.a11 == Approx(2.0).epsilon(1e-14));
    CHECK(p.a.a22 == Approx(3.0).epsilon(1e-14));
    CHECK(p.eig_min > 0.0);
  }
  // Freestream on the Mach circle: parabolic degenerate.
  {
    const auto p = principal_coefficients(1.0, 2.0, {0.0, 0.0}, {-std::sqrt(3.0), 0.0});
    CHECK(std::abs(p.eig_min) < 1e-13);
  }

  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const double mu = testsup::uniform(rng);
    const double phi = testsup::uniform(rng, -3.0, 3.0);
    const Vec2 g{testsup::uniform(rng, -2.0, 2.0), testsup::uniform(rng, -2.0, 2.0)};
    const Vec2 xi{testsup::uniform(rng, -1.7, 0.0), testsup::uniform(rng, 0.0, 1.7)};
    const Sym2 h{testsup::uniform(rng, -2.0, 2.0), testsup::uniform(rng, -2.0, 2.0),
                 testsup::uniform(rng, -2.0, 2.0)};
    const auto p = principal_coefficients(mu, phi, g, xi);
    const double via_a = p.a.a11 * h.a11 + 2.0 * p.a.a12 * h.a12 + p.a.a22 * h.a22;
    const double direct = interior_residual(mu, phi, g, h, xi);
    CHECK(via_a == Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("ellipticity classification matches L^2 at mu = 1") {
  std::mt19937_64 rng(13);
  int checked = 0;
  while (checked < 200) {
    const double phi = testsup::uniform(rng, 0.5, 4.0);
    const Vec2 g{testsup::uniform(rng, -1.5, 1.5), testsup::uniform(rng, -1.5, 1.5)};
    const Vec2 xi{testsup::uniform(rng, -1.7, 0.0), testsup::uniform(rng, 0.0, 1.7)};
    const auto st = derived_state(phi, g, xi, 1.0);
    if (st.subsonic) continue;
    const Vec2 w = g - st.chi * xi;
    if (norm(w) < 1e-6) continue;
    ++checked;
    const auto p = principal_coefficients(1.0, phi, g, xi);
    if (st.L2 < 1.0 - 1e-10) CHECK(p.eig_min > 0.0);
    if (st.L2 > 1.0 + 1e-10) CHECK(p.eig_min < 0.0);
  }
}

TEST_CASE("boundary_residual on all four sides") {
  const auto d = testsup::standard_domain();

  CHECK(std::abs(boundary_residual(BoundarySide::cone, 0.05, 2.05, {0.0, 0.0},
                                   {-std::sqrt(3.0), 0.0}, d)) < 1e-14);

  const Vec2 p3 = d.p3;
  CHECK(boundary_residual(BoundarySide::py, 0.0, 2.0, {0.0, 0.0}, p3, d) ==
        Approx(2.0 * std::tan(kPi / 6.0)).epsilon(1e-7));

  // The two algebraic forms of the wing condition agree identically.
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const double t = testsup::uniform(rng);
    const Vec2 xi = geometry::boundary_point(d, BoundarySide::py, t);
    const double phi = testsup::uniform(rng, -2.0, 3.0);
    const Vec2 g{testsup::uniform(rng, -2.0, 2.0), testsup::uniform(rng, -2.0, 2.0)};
    const double form1 = boundary_residual(BoundarySide::py, 0.0, phi, g, xi, d);
    const double tan2 = std::tan(d.sigma2);
    const double form2 = dot(g, d.nu_py - tan2 * xi) + phi * tan2;
    CHECK(form1 == Approx(form2).epsilon(1e-14));
  }

  CHECK(boundary_residual(BoundarySide::sy1, 0.0, 1.0, {0.7, -0.2}, {0.0, 1.0}, d) ==
        Approx(0.7).epsilon(1e-15));
  CHECK(boundary_residual(BoundarySide::sy2, 0.0, 1.0, {0.7, -0.2}, {-1.0, 0.0}, d) ==
        Approx(0.2).epsilon(1e-15));

  CHECK_THROWS_AS(boundary_residual(BoundarySide::cone, 0.0, 2.0, {0.0, 0.0}, {-1.0, 0.0}, d),
                  Error);
  try {
    boundary_residual(BoundarySide::py, 0.0, 2.0, {0.0, 0.0}, {-1.0, 0.8}, d);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointOffBoundary);
  }
}

TEST_CASE("obliqueness constant") {
  CHECK(obliqueness(testsup::standard_domain()) == Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(obliqueness(geometry::build_domain(kPi / 6.0, kPi / 4.0, 2.0)) ==
        Approx(5.0).epsilon(1e-13));

  // (nu_py - tan(s2) xi) . nu_py is constant along the wing edge.
  const auto d = testsup::standard_domain();
  const double expected = obliqueness(d);
  for (int k = 0; k < 20; ++k) {
    const double t = (k + 0.5) / 20.0;
    const Vec2 xi = geometry::boundary_point(d, BoundarySide::py, t);
    const double val = dot(d.nu_py - std::tan(d.sigma2) * xi, d.nu_py);
    CHECK(val == Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("linear_exact and residual annihilation") {
  const auto fs = linear_exact({0.0, 0.0, 2.0}, {-1.3, 0.2});
  CHECK(fs.phi == 2.0);
  CHECK(fs.grad.x1 == 0.0);
  CHECK(fs.chi == 2.0);
  CHECK(fs.c2 == 3.0);

  const auto ex = linear_exact({0.3, 0.1, 2.0}, {-1.0, 0.5});
  CHECK(ex.phi == Approx(1.75).epsilon(1e-15));
  CHECK(ex.chi == 2.0);
  CHECK(ex.c2 == Approx(3.1).epsilon(1e-14));

  CHECK_THROWS_AS(linear_exact({0.5, 0.5, 0.5}, {0.0, 0.0}), Error);

  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vec3 eta = testsup::random_eta(rng);
    for (double mu : {0.0, 0.5, 1.0}) {
      const Vec2 xi{testsup::uniform(rng, -1.7, 0.0), testsup::uniform(rng, 0.0, 1.7)};
      const auto lin = linear_exact(eta, xi);
      CHECK(interior_residual(mu, lin.phi, lin.grad, Sym2{}, xi) == 0.0);
    }
  }
}

TEST_CASE("classify_eta worked examples") {
  const auto d = testsup::standard_domain();

  // Interior direction with amplitude below the lifted cone value.
  {
    const double eps = 0.1;
    const Vec3 dir{-1.0, 0.3, 1.0};
    const Vec3 eta = ((1.0 + eps / 2.0) / norm(dir)) * dir;
    CHECK(classify_eta(eta, d, eps) == EtaClass::sub);
  }
  // The freestream is neither: its cone trace is exactly 1.
  CHECK(classify_eta({0.0, 0.0, 2.0}, d, 0.05) == EtaClass::neither);
  // Tilted large-amplitude vector is a super-solution.
  CHECK(classify_eta({0.1, -0.1, 3.0}, d, 0.1) == EtaClass::super);

  CHECK_THROWS_AS(classify_eta({0.1, 0.1, 0.5}, d, 0.1), Error);
  CHECK_THROWS_AS(classify_eta({0.1, -0.1, 3.0}, d, 0.1, 8), Error);
}

TEST_CASE("envelope mechanics") {
  const auto d = testsup::standard_domain();
  const geometry::Mesh mesh = geometry::build_mesh(d, 17, 17);
  const double eps = 0.1;

  // A single sub direction anchored at a mesh node: the lower envelope
  // attains its amplitude exactly there.
  {
    const Vec2 anchor = mesh.node(8, 8);
    const double amp = 1.0 + eps - eps / 10.0;
    const Vec3 x{anchor.x1, anchor.x2, 1.0};
    const Vec3 eta_sub = (amp / norm(x)) * x;
    const Vec3 eta_super{0.1, -0.1, 8.0};
    const std::vector<Vec3> family{eta_sub, eta_super};
    const auto env = envelope(d, eps, family, mesh);
    CHECK(env.n_sub == 1);
    CHECK(env.n_super == 1);
    const double r = std::sqrt(1.0 + norm2(anchor));
    CHECK(env.lower.at(8, 8) == Approx(r * amp).epsilon(1e-12));

    // Super definition forces upper >= sqrt(1+|xi|^2)(1+eps) on cone nodes.
    for (int j = 0; j < mesh.n_v; ++j) {
      const Vec2 xi = mesh.node(mesh.n_u - 1, j);
      CHECK(env.upper.at(mesh.n_u - 1, j) >=
            std::sqrt(1.0 + norm2(xi)) * (1.0 + eps) - 1e-9);
    }
  }

  // Default family: ordered envelopes and a strictly positive interior
  // margin.
  {
    const auto family = default_eta_family(d, eps);
    const auto env = envelope(d, eps, family, mesh);
    CHECK(env.n_sub > 0);
    CHECK(env.n_super == 6);
    for (int k = 0; k < mesh.size(); ++k) CHECK(env.lower.values[k] <= env.upper.values[k]);
    CHECK(env.delta0 > 0.0);
  }

  // Both classes are required.
  {
    const Vec3 only_sub = (1.02 / std::sqrt(2.0)) * Vec3{-0.8, 0.4, 1.0};
    const std::vector<Vec3> family{only_sub};
    CHECK_THROWS_AS(envelope(d, eps, family, mesh), Error);
  }

  // Family refinement: tightened super vectors press the upper envelope down
  // to sqrt(1+|xi|^2)(1+eps) on the shock boundary, linearly in delta.
  {
    const double v = d.v3inf, r = d.mach_radius;
    const Vec3 anchor_dir{mesh.node(8, 8).x1, mesh.node(8, 8).x2, 1.0};
    const Vec3 sub = ((1.0 + eps / 2.0) / norm(anchor_dir)) * anchor_dir;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double delta : {0.2, 0.1, 0.05, 0.025}) {
      const double m = v * (1.0 + eps) + delta * std::sqrt(2.0) * r * (1.0 + 1e-9) + 1e-12;
      const std::vector<Vec3> family{sub, Vec3{delta, -delta, m}};
      const auto env = envelope(d, eps, family, mesh);
      double gap = 0.0;
      for (int j = 0; j < mesh.n_v; ++j) {
        const Vec2 xi = mesh.node(mesh.n_u - 1, j);
        gap = std::max(gap, env.upper.at(mesh.n_u - 1, j) / std::sqrt(1.0 + norm2(xi)) -
                                (1.0 + eps));
      }
      CHECK(gap >= 0.0);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap < 0.01);
  }
}

TEST_CASE("s transform") {
  const Vec2 xi{-1.0, 0.0};
  const double r = std::sqrt(2.0);
  CHECK(s_transform(r * std::cosh(0.3), xi, STransform::to_s) == Approx(0.3).epsilon(1e-13));

  // arcosh(1 + eps) against the log-form long-double oracle.
  const double eps = 0.05;
  const long double oracle = std::log(1.05L + std::sqrt(1.05L * 1.05L - 1.0L));
  CHECK(s_transform((1.0 + eps) * r, xi, STransform::to_s) ==
        Approx(static_cast<double>(oracle)).epsilon(1e-13));

  CHECK_THROWS_AS(s_transform(r, xi, STransform::to_s), Error);

  std::mt19937_64 rng(29);
  for (int k = 0; k < 100; ++k) {
    const Vec2 p{testsup::uniform(rng, -1.7, 0.0), testsup::uniform(rng, 0.0, 1.7)};
    const double s = testsup::uniform(rng, 1e-3, 2.0);
    const double phi = s_transform(s, p, STransform::from_s);
    CHECK(s_transform(phi, p, STransform::to_s) == Approx(s).epsilon(1e-13));
  }
}

TEST_CASE("s-form kernel: constant state, consistency, monotonicity") {
  // Constant s at xi = (-1, 0), mu = 1: only the zero-order term survives,
  // (2 + 0)(1 + 0) / ((1+1) tanh s0) = 1/tanh(s0).
  for (double s0 : {0.2, 0.7, 1.5}) {
    const double expected = 1.0 / std::tanh(s0);
    CHECK(s_interior_residual(1.0, s0, {0.0, 0.0}, Sym2{}, {-1.0, 0.0}) ==
          Approx(expected).epsilon(1e-14));
  }

  CHECK_THROWS_AS(s_interior_residual(1.0, 0.0, {0.0, 0.0}, Sym2{}, {-1.0, 0.0}), Error);

  // Exact chain-rule consistency: the phi-form residual equals
  // sqrt(1+|xi|^2) sinh^3(s) times the s-form residual.
  std::mt19937_64 rng(31);
  for (int k = 0; k < 200; ++k) {
    const Vec2 xi{testsup::uniform(rng, -1.5, -0.1), testsup::uniform(rng, 0.1, 1.5)};
    SState st;
    st.s = testsup::uniform(rng, 0.1, 1.2);
    st.ds = {testsup::uniform(rng, -0.8, 0.8), testsup::uniform(rng, -0.8, 0.8)};
    st.hs = {testsup::uniform(rng, -1.0, 1.0), testsup::uniform(rng, -1.0, 1.0),
             testsup::uniform(rng, -1.0, 1.0)};
    const double mu = testsup::uniform(rng);

    double phi;
    Vec2 grad;
    Sym2 hess;
    s_to_phi(st, xi, phi, grad, hess);

    const double r = std::sqrt(1.0 + norm2(xi));
    const double factor = r * std::pow(std::sinh(st.s), 3);
    const double lhs = interior_residual(mu, phi, grad, hess, xi);
    const double rhs = factor * s_interior_residual(mu, st.s, st.ds, st.hs, xi);
    CHECK(lhs == Approx(rhs).epsilon(1e-9));
  }

  // The zero-order term is nonincreasing in s at frozen (Ds, D^2 s, xi, mu).
  for (int k = 0; k < 1000; ++k) {
    const Vec2 xi{testsup::uniform(rng, -1.7, 0.0), testsup::uniform(rng, 0.0, 1.7)};
    const Vec2 ds{testsup::uniform(rng, -1.0, 1.0), testsup::uniform(rng, -1.0, 1.0)};
    const Sym2 hs{testsup::uniform(rng, -1.0, 1.0), testsup::uniform(rng, -1.0, 1.0),
                  testsup::uniform(rng, -1.0, 1.0)};
    const double mu = testsup::uniform(rng);
    const double s1 = testsup::uniform(rng, 1e-2, 2.0);
    const double s2 = s1 + testsup::uniform(rng, 1e-3, 1.0);
    const double r1 = s_interior_residual(mu, s1, ds, hs, xi);
    const double r2 = s_interior_residual(mu, s2, ds, hs, xi);
    CHECK(r2 <= r1 + 1e-14);
  }
}

TEST_CASE("spherical lift and inverse") {
  {
    const auto s = spherical_lift({0.0, 0.0}, 1.3);
    CHECK(s.psi == Approx(1.3).epsilon(1e-15));
    CHECK(s.theta == Approx(kPi / 2.0).epsilon(1e-14));
    CHECK(s.azimuth == Approx(kPi / 2.0).epsilon(1e-14));
  }
  // Freestream on the Mach circle has psi = 1.
  CHECK(spherical_lift({-std::sqrt(3.0), 0.0}, 2.0).psi == Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(37);
  for (int k = 0; k < 100; ++k) {
    const Vec2 xi{testsup::uniform(rng, -1.7, 0.0), testsup::uniform(rng, 0.0, 1.7)};
    const double phi = testsup::uniform(rng, 0.5, 3.0);
    const auto s = spherical_lift(xi, phi);
    const auto back = spherical_lift_inverse(s);
    CHECK(back.xi.x1 == Approx(xi.x1).epsilon(1e-13));
    CHECK(back.xi.x2 == Approx(xi.x2).epsilon(1e-13));
    CHECK(back.phi == Approx(phi).epsilon(1e-13));
  }
}

TEST_CASE("hat transform") {
  const auto d = testsup::standard_domain();

  const auto p3 = hat_transform(d.p3, 1.7, d.sigma2);
  CHECK(std::abs(p3.xi_hat.x1) < 1e-13);
  CHECK(std::abs(p3.xi_hat.x2) < 1e-13);

  const auto ident = hat_transform({-0.7, 0.4}, 1.9, 0.0);
  CHECK(ident.xi_hat.x1 == -0.7);
  CHECK(ident.xi_hat.x2 == 0.4);
  CHECK(ident.phi_hat == 1.9);

  // Linear exact solutions map to linear exact solutions with the rotated
  // coefficient vector.
  std::mt19937_64 rng(41);
  for (int k = 0; k < 30; ++k) {
    const Vec3 eta = testsup::random_eta(rng, 1.5, 16.0);
    const Vec2 xi{testsup::uniform(rng, -1.5, 0.0), testsup::uniform(rng, 0.0, 1.5)};
    const double s2 = d.sigma2;
    const auto lin = linear_exact(eta, xi);
    const auto hat = hat_transform(xi, lin.phi, s2);
    const Vec3 eta_hat{eta.x1 * std::cos(s2) + eta.x3 * std::sin(s2), eta.x2,
                       -eta.x1 * std::sin(s2) + eta.x3 * std::cos(s2)};
    const double expect = eta_hat.x1 * hat.xi_hat.x1 + eta_hat.x2 * hat.xi_hat.x2 + eta_hat.x3;
    CHECK(hat.phi_hat == Approx(expect).epsilon(1e-13));
    if (norm2(eta_hat) > 1.0) {
      const auto lin_hat = linear_exact(eta_hat, hat.xi_hat);
      CHECK(interior_residual(1.0, lin_hat.phi, lin_hat.grad, Sym2{}, hat.xi_hat) == 0.0);
    }
  }

  CHECK_THROWS_AS(hat_transform({100.0, 0.0}, 1.0, 0.3), Error);
}

TEST_CASE("grad_L2 identities") {
  // Freestream: D(L^2) = (-2/3, 0) at xi = (-1, 0).
  {
    const Vec2 g = grad_L2(2.0, {0.0, 0.0}, Sym2{}, {-1.0, 0.0});
    CHECK(g.x1 == Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(g.x2) < 1e-15);
  }

  // The degenerate-state identity: Dphi = 0, phi^2 = 1 + |xi|^2 gives
  // D(L^2) = 2 xi / ((1+|xi|^2) c^2), strictly negative first component on
  // the negative xi1 axis.
  {
    const Vec2 xi{-1.2, 0.0};
    const double phi = std::sqrt(1.0 + norm2(xi));
    const double c2 = norm2(xi);  // |Dphi|^2 + chi^2 - 1 with chi = phi
    const Vec2 g = grad_L2(phi, {0.0, 0.0}, Sym2{}, xi);
    CHECK(g.x1 == Approx(2.0 * xi.x1 / ((1.0 + norm2(xi)) * c2)).epsilon(1e-13));
    CHECK(g.x1 < 0.0);
    CHECK(std::abs(g.x2) < 1e-15);
  }

  // Centered differences of the analytic L^2 of a manufactured field.
  const testsup::Manufactured man;
  const auto d = testsup::standard_domain();
  std::mt19937_64 rng(43);
  const double step = 1e-4;
  for (int k = 0; k < 50; ++k) {
    const Vec2 xi = testsup::random_interior_point(rng, d);
    auto l2_at = [&man](Vec2 p) { return derived_state(man.phi(p), man.grad(p), p, 1.0).L2; };
    const Vec2 fd{(l2_at({xi.x1 + step, xi.x2}) - l2_at({xi.x1 - step, xi.x2})) / (2 * step),
                  (l2_at({xi.x1, xi.x2 + step}) - l2_at({xi.x1, xi.x2 - step})) / (2 * step)};
    const Vec2 formula = grad_L2(man.phi(xi), man.grad(xi), man.hess(xi), xi);
    CHECK(norm(formula - fd) / std::max(norm(fd), 1e-8) < 1e-4);
  }

  CHECK_THROWS_AS(grad_L2(1.0, {0.0, 0.0}, Sym2{}, {0.0, 0.0}), Error);
}

TEST_CASE("characteristic form") {
  CHECK(characteristic_form({0.0, 0.0, 1.0}, {0.0, 0.0, 2.0}) == Approx(-1.0).epsilon(1e-15));
  CHECK(characteristic_form({1.0, 0.0, 0.0}, {0.0, 0.0, 2.0}) == Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(characteristic_form({0.5, 0.5, 0.5}, {0.0, 0.0, 2.0}), Error);

  // The freestream Mach cone is characteristic: Q vanishes on its normals.
  const double v = 2.0;
  const auto cfg = testsup::standard_config();
  for (const Vec3& x : geometry::shock_cone_sample(cfg, 64)) {
    Vec3 n{x.x1, x.x2, (1.0 - v * v) * x.x3};
    n = (1.0 / norm(n)) * n;
    CHECK(std::abs(characteristic_form(n, {0.0, 0.0, v})) < 1e-13);
  }
}
