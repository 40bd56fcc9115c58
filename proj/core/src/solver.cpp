#include "chaplygin/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "chaplygin/errors.hpp"

namespace chaplygin::solver {

namespace {

using geometry::BoundaryTag;

double cone_value(Vec2 xi, double eps) { return std::sqrt(1.0 + norm2(xi)) + eps; }

int worker_count(int n_items) {
  static const int cap = [] {
    if (const char* env = std::getenv("CHAPLYGIN_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
  }();
  if (n_items < 4096) return 1;
  return std::min(cap, std::max(1, n_items / 2048));
}

// Deterministic chunked parallel loop over grid rows; bodies write disjoint
// slots. `work_items` (total nodes) decides whether threads are worth it.
void parallel_rows(int n, int work_items, const std::function<void(int, int)>& body) {
  const int workers = std::min(worker_count(work_items), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int b = w * chunk;
    const int e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(body, b, e);
  }
  for (auto& t : pool) t.join();
}

double sup_norm(const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

void eval_residual_phi(const DiscreteOps& ops, double mu, double eps, const ScalarField& f,
                       std::vector<double>& out) {
  const Mesh& mesh = ops.mesh();
  const geometry::Domain& dom = mesh.domain;
  const double tan2 = std::tan(dom.sigma2);
  out.resize(mesh.size());
  parallel_rows(mesh.n_v, mesh.size(), [&](int jb, int je) {
    for (int j = jb; j < je; ++j) {
      for (int i = 0; i < mesh.n_u; ++i) {
        const int k = mesh.idx(i, j);
        const Vec2 xi = mesh.nodes[k];
        const BoundaryTag tag = mesh.tags[k];
        double r;
        if (geometry::on_cone(tag)) {
          r = f.values[k] - cone_value(xi, eps);
        } else if (geometry::on_py(tag)) {
          const Vec2 g = ops.gradient(f, i, j);
          const double chi = f.values[k] - dot(g, xi);
          r = dot(g, dom.nu_py) + chi * tan2;
        } else if (tag == BoundaryTag::sy1) {
          r = ops.gradient(f, i, j).x1;
        } else if (tag == BoundaryTag::sy2) {
          r = -ops.gradient(f, i, j).x2;
        } else {
          const Vec2 g = ops.gradient(f, i, j);
          const Sym2 h = ops.hessian(f, i, j);
          r = fields::interior_residual(mu, f.values[k], g, h, xi);
        }
        out[k] = r;
      }
    }
  });
}

double s_bc_value(Vec2 xi, double eps) {
  const double r = std::sqrt(1.0 + norm2(xi));
  return std::acosh((r + eps) / r);
}

void eval_residual_s(const DiscreteOps& ops, double mu, double eps, const ScalarField& f,
                     std::vector<double>& out) {
  const Mesh& mesh = ops.mesh();
  const geometry::Domain& dom = mesh.domain;
  const double tan2 = std::tan(dom.sigma2);
  out.resize(mesh.size());
  parallel_rows(mesh.n_v, mesh.size(), [&](int jb, int je) {
    for (int j = jb; j < je; ++j) {
      for (int i = 0; i < mesh.n_u; ++i) {
        const int k = mesh.idx(i, j);
        const Vec2 xi = mesh.nodes[k];
        const BoundaryTag tag = mesh.tags[k];
        double r;
        if (geometry::on_cone(tag)) {
          r = f.values[k] - s_bc_value(xi, eps);
        } else if (geometry::on_py(tag)) {
          const Vec2 g = ops.gradient(f, i, j);
          r = dot(g, dom.nu_py - tan2 * xi);
        } else if (tag == BoundaryTag::sy1) {
          r = ops.gradient(f, i, j).x1;
        } else if (tag == BoundaryTag::sy2) {
          r = -ops.gradient(f, i, j).x2;
        } else {
          const double s = f.values[k];
          if (!(s > 0.0)) {
            r = std::numeric_limits<double>::quiet_NaN();
          } else {
            const Vec2 g = ops.gradient(f, i, j);
            const Sym2 h = ops.hessian(f, i, j);
            r = fields::s_interior_residual(mu, s, g, h, xi);
          }
        }
        out[k] = r;
      }
    }
  });
}

// Column stencil of each residual row (Dirichlet rows touch only themselves).
std::vector<std::vector<int>> build_pattern(const DiscreteOps& ops) {
  const Mesh& mesh = ops.mesh();
  std::vector<std::vector<int>> pattern(mesh.size());
  for (int j = 0; j < mesh.n_v; ++j)
    for (int i = 0; i < mesh.n_u; ++i) {
      const int k = mesh.idx(i, j);
      if (geometry::on_cone(mesh.tags[k]))
        pattern[k] = {k};
      else
        pattern[k] = ops.at(k).stencil;
    }
  return pattern;
}

using ResidualFn =
    std::function<void(const DiscreteOps&, double, double, const ScalarField&, std::vector<double>&)>;

SparseMatrix assemble_colored(const DiscreteOps& ops, double mu, double eps,
                              const ScalarField& field, const ResidualFn& residual) {
  const int n = ops.mesh().size();
  const auto pattern = build_pattern(ops);

  std::vector<std::vector<int>> rows_of_col(n);
  for (int r = 0; r < n; ++r)
    for (int c : pattern[r]) rows_of_col[c].push_back(r);

  // Greedy distance-2 coloring of columns.
  std::vector<int> color(n, -1);
  std::vector<int> stamp(64, -1);
  int n_colors = 0;
  for (int c = 0; c < n; ++c) {
    for (int r : rows_of_col[c])
      for (int c2 : pattern[r])
        if (color[c2] >= 0) {
          if (color[c2] >= static_cast<int>(stamp.size())) stamp.resize(color[c2] + 1, -1);
          stamp[color[c2]] = c;
        }
    int g = 0;
    while (g < static_cast<int>(stamp.size()) && stamp[g] == c) ++g;
    color[c] = g;
    n_colors = std::max(n_colors, g + 1);
  }

  std::vector<double> r0, r1;
  residual(ops, mu, eps, field, r0);

  std::vector<Eigen::Triplet<double>> trips;
  ScalarField pert = field;
  std::vector<double> steps(n, 0.0);
  for (int g = 0; g < n_colors; ++g) {
    pert.values = field.values;
    for (int c = 0; c < n; ++c)
      if (color[c] == g) {
        steps[c] = 1e-7 * (1.0 + std::abs(field.values[c]));
        pert.values[c] += steps[c];
      }
    residual(ops, mu, eps, pert, r1);
    for (int c = 0; c < n; ++c)
      if (color[c] == g)
        for (int r : rows_of_col[c]) trips.emplace_back(r, c, (r1[r] - r0[r]) / steps[c]);
  }

  SparseMatrix jac(n, n);
  jac.setFromTriplets(trips.begin(), trips.end());
  return jac;
}

SparseMatrix assemble_analytic_phi(const DiscreteOps& ops, double mu, double eps,
                                   const ScalarField& f) {
  (void)eps;
  const Mesh& mesh = ops.mesh();
  const geometry::Domain& dom = mesh.domain;
  const double tan2 = std::tan(dom.sigma2);
  const int n = mesh.size();

  // Preallocate one slot per (row, stencil entry); rows fill disjoint ranges.
  std::vector<int> offsets(n + 1, 0);
  for (int k = 0; k < n; ++k)
    offsets[k + 1] = offsets[k] + (geometry::on_cone(mesh.tags[k])
                                       ? 1
                                       : static_cast<int>(ops.at(k).stencil.size()));
  std::vector<Eigen::Triplet<double>> trips(offsets[n]);

  parallel_rows(mesh.n_v, mesh.size(), [&](int jb, int je) {
    for (int j = jb; j < je; ++j) {
      for (int i = 0; i < mesh.n_u; ++i) {
        const int k = mesh.idx(i, j);
        const Vec2 xi = mesh.nodes[k];
        const BoundaryTag tag = mesh.tags[k];
        int slot = offsets[k];
        if (geometry::on_cone(tag)) {
          trips[slot] = {k, k, 1.0};
          continue;
        }
        const NodeOperator& op = ops.at(k);
        const int ns = static_cast<int>(op.stencil.size());
        if (geometry::on_py(tag)) {
          const Vec2 dir = dom.nu_py - tan2 * xi;
          for (int m = 0; m < ns; ++m) {
            double w = dir.x1 * op.w_p1[m] + dir.x2 * op.w_p2[m];
            if (op.stencil[m] == k) w += tan2;
            trips[slot++] = {k, op.stencil[m], w};
          }
        } else if (tag == BoundaryTag::sy1) {
          for (int m = 0; m < ns; ++m) trips[slot++] = {k, op.stencil[m], op.w_p1[m]};
        } else if (tag == BoundaryTag::sy2) {
          for (int m = 0; m < ns; ++m) trips[slot++] = {k, op.stencil[m], -op.w_p2[m]};
        } else {
          const double phi = f.values[k];
          const Vec2 g = ops.gradient(f, i, j);
          const Sym2 h = ops.hessian(f, i, j);
          const double chi = phi - dot(g, xi);
          const double c2 = norm2(g) + chi * chi - 1.0;
          const Vec2 w = g - chi * xi;
          const double t = h.trace() + h.quadratic(xi);
          const Vec2 hw = h.apply(w);
          const double hw_xi = dot(hw, xi);
          const double dr_phi = 2.0 * chi * t + 2.0 * mu * hw_xi;
          const double dr_p1 = 2.0 * w.x1 * t - 2.0 * mu * (hw.x1 + xi.x1 * hw_xi);
          const double dr_p2 = 2.0 * w.x2 * t - 2.0 * mu * (hw.x2 + xi.x2 * hw_xi);
          const double dr_h11 = c2 * (1.0 + xi.x1 * xi.x1) - mu * w.x1 * w.x1;
          const double dr_h12 = 2.0 * c2 * xi.x1 * xi.x2 - 2.0 * mu * w.x1 * w.x2;
          const double dr_h22 = c2 * (1.0 + xi.x2 * xi.x2) - mu * w.x2 * w.x2;
          for (int m = 0; m < ns; ++m) {
            double val = dr_p1 * op.w_p1[m] + dr_p2 * op.w_p2[m] + dr_h11 * op.w_h11[m] +
                         dr_h12 * op.w_h12[m] + dr_h22 * op.w_h22[m];
            if (op.stencil[m] == k) val += dr_phi;
            trips[slot++] = {k, op.stencil[m], val};
          }
        }
      }
    }
  });

  SparseMatrix jac(n, n);
  jac.setFromTriplets(trips.begin(), trips.end());
  return jac;
}

std::string singular_diagnostic(const DiscreteOps& ops, double mu, const ScalarField& f) {
  const Mesh& mesh = ops.mesh();
  double worst = std::numeric_limits<double>::infinity();
  int wi = -1, wj = -1;
  for (int j = 1; j < mesh.n_v - 1; ++j)
    for (int i = 1; i < mesh.n_u - 1; ++i) {
      const auto p = fields::principal_coefficients(mu, f.at(i, j), ops.gradient(f, i, j),
                                                    mesh.node(i, j));
      if (p.eig_min < worst) {
        worst = p.eig_min;
        wi = i;
        wj = j;
      }
    }
  std::ostringstream os;
  os << "factorization failed; smallest principal eigenvalue " << worst << " at node (" << wi
     << ", " << wj << ")";
  if (worst <= 0.0) os << " where ellipticity is lost";
  return os.str();
}

struct NewtonKernel {
  ResidualFn residual;
  std::function<SparseMatrix(const DiscreteOps&, double, double, const ScalarField&)> jacobian;
};

Solution newton_core(const DiscreteOps& ops, double mu, double eps, const ScalarField& start,
                     const NewtonOptions& opts, const NewtonKernel& kernel) {
  const Mesh& mesh = ops.mesh();
  Solution sol;
  sol.mu = mu;
  sol.eps = eps;
  sol.field = start;
  sol.field.mu = mu;
  sol.field.eps = eps;

  std::vector<double> r;
  kernel.residual(ops, mu, eps, sol.field, r);
  double sup = sup_norm(r);
  sol.residual_history.push_back(sup);
  if (!std::isfinite(sup)) throw Error(ErrorCode::Diverged, "non-finite start residual");
  if (sup <= opts.tol) {
    sol.converged = true;
    return sol;
  }

  const int n = mesh.size();
  Eigen::VectorXd rhs(n), delta(n);
  ScalarField trial = sol.field;
  std::vector<double> rt;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    SparseMatrix jac = kernel.jacobian(ops, mu, eps, sol.field);
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorCode::SingularJacobian, singular_diagnostic(ops, mu, sol.field));
    for (int k = 0; k < n; ++k) rhs[k] = -r[k];
    delta = lu.solve(rhs);
    // Cone rows are linear with unit diagonal and zero residual; pin them so
    // the Dirichlet values stay bit-exact.
    for (int k = 0; k < n; ++k)
      if (geometry::on_cone(mesh.tags[k])) delta[k] = 0.0;

    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (int k = 0; k < n; ++k) trial.values[k] = sol.field.values[k] + t * delta[k];
      kernel.residual(ops, mu, eps, trial, rt);
      const double sup_t = sup_norm(rt);
      if (std::isfinite(sup_t) && sup_t < sup) {
        sol.field.values = trial.values;
        r = rt;
        sup = sup_t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      sol.converged = false;
      return sol;
    }
    sol.residual_history.push_back(sup);
    if (sup <= opts.tol) {
      sol.converged = true;
      return sol;
    }
  }
  sol.converged = false;
  return sol;
}

void check_cone_rows(const Mesh& mesh, const ScalarField& start, double eps) {
  for (int k = 0; k < mesh.size(); ++k) {
    if (!geometry::on_cone(mesh.tags[k])) continue;
    if (std::abs(start.values[k] - cone_value(mesh.nodes[k], eps)) > 1e-13)
      throw Error(ErrorCode::BadParameter,
                  "start field violates the cone Dirichlet rows; warm starts must carry the "
                  "exact lifted boundary values");
  }
}

NewtonKernel phi_kernel(JacobianMode mode) {
  NewtonKernel k;
  k.residual = eval_residual_phi;
  if (mode == JacobianMode::analytic)
    k.jacobian = [](const DiscreteOps& ops, double mu, double eps, const ScalarField& f) {
      return assemble_analytic_phi(ops, mu, eps, f);
    };
  else
    k.jacobian = [](const DiscreteOps& ops, double mu, double eps, const ScalarField& f) {
      return assemble_colored(ops, mu, eps, f, eval_residual_phi);
    };
  return k;
}

}  // namespace

std::vector<double> discrete_residual(const DiscreteOps& ops, double mu, double eps,
                                      const ScalarField& field) {
  std::vector<double> r;
  eval_residual_phi(ops, mu, eps, field, r);
  return r;
}

std::vector<double> discrete_residual(const Mesh& mesh, double mu, double eps,
                                      const ScalarField& field) {
  return discrete_residual(DiscreteOps(mesh), mu, eps, field);
}

SparseMatrix assemble_jacobian(const DiscreteOps& ops, double mu, double eps,
                               const ScalarField& field, JacobianMode mode) {
  if (mode == JacobianMode::analytic) return assemble_analytic_phi(ops, mu, eps, field);
  return assemble_colored(ops, mu, eps, field, eval_residual_phi);
}

SparseMatrix assemble_jacobian(const Mesh& mesh, double mu, double eps, const ScalarField& field,
                               JacobianMode mode) {
  return assemble_jacobian(DiscreteOps(mesh), mu, eps, field, mode);
}

Solution initial_guess(const Mesh& mesh, double eps, const NewtonOptions& opts) {
  const DiscreteOps ops(mesh);
  const geometry::Domain& dom = mesh.domain;
  const double tan2 = std::tan(dom.sigma2);
  const int n = mesh.size();

  ScalarField field(mesh.n_u, mesh.n_v);
  for (int k = 0; k < n; ++k)
    field.values[k] = std::max(dom.v3inf, cone_value(mesh.nodes[k], eps));

  // The mu = 0 interior rows scale the linear operator
  // Lap phi + D^2 phi[xi,xi] by c^2(phi) > 0, so each frozen-coefficient
  // sweep solves the unscaled linear problem; the loop re-checks the true
  // residual and guards against stalls.
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < mesh.n_v; ++j) {
    for (int i = 0; i < mesh.n_u; ++i) {
      const int k = mesh.idx(i, j);
      const Vec2 xi = mesh.nodes[k];
      const BoundaryTag tag = mesh.tags[k];
      if (geometry::on_cone(tag)) {
        trips.emplace_back(k, k, 1.0);
        rhs[k] = cone_value(xi, eps);
        continue;
      }
      const NodeOperator& op = ops.at(k);
      const int ns = static_cast<int>(op.stencil.size());
      if (geometry::on_py(tag)) {
        const Vec2 dir = dom.nu_py - tan2 * xi;
        for (int m = 0; m < ns; ++m) {
          double w = dir.x1 * op.w_p1[m] + dir.x2 * op.w_p2[m];
          if (op.stencil[m] == k) w += tan2;
          trips.emplace_back(k, op.stencil[m], w);
        }
      } else if (tag == BoundaryTag::sy1) {
        for (int m = 0; m < ns; ++m) trips.emplace_back(k, op.stencil[m], op.w_p1[m]);
      } else if (tag == BoundaryTag::sy2) {
        for (int m = 0; m < ns; ++m) trips.emplace_back(k, op.stencil[m], -op.w_p2[m]);
      } else {
        const double c11 = 1.0 + xi.x1 * xi.x1;
        const double c12 = 2.0 * xi.x1 * xi.x2;
        const double c22 = 1.0 + xi.x2 * xi.x2;
        for (int m = 0; m < ns; ++m)
          trips.emplace_back(k, op.stencil[m],
                             c11 * op.w_h11[m] + c12 * op.w_h12[m] + c22 * op.w_h22[m]);
      }
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::LinearSolveFailure, "mu = 0 operator factorization failed");

  Solution sol;
  sol.mu = 0.0;
  sol.eps = eps;
  sol.field = field;
  sol.field.mu = 0.0;
  sol.field.eps = eps;

  double prev_sup = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < std::max(2, opts.max_iter); ++sweep) {
    Eigen::VectorXd x = lu.solve(rhs);
    // Two passes of iterative refinement; the 1/h^2 row scale otherwise
    // leaves the direct-solve residual above tight tolerances on fine grids.
    for (int ref = 0; ref < 2; ++ref) {
      const Eigen::VectorXd resid = rhs - a * x;
      x += lu.solve(resid);
    }
    for (int k = 0; k < n; ++k) sol.field.values[k] = x[k];
    // The factorization leaves the identity rows with rounding-level drift;
    // the Dirichlet values must hold exactly.
    for (int k = 0; k < n; ++k)
      if (geometry::on_cone(mesh.tags[k])) sol.field.values[k] = cone_value(mesh.nodes[k], eps);
    std::vector<double> r;
    eval_residual_phi(ops, 0.0, eps, sol.field, r);
    const double sup = sup_norm(r);
    sol.residual_history.push_back(sup);
    if (sup <= opts.tol) {
      sol.converged = true;
      return sol;
    }
    if (sup >= prev_sup) {
      std::ostringstream os;
      os << "frozen-coefficient sweeps stalled at residual " << sup << " (tol " << opts.tol
         << ")";
      throw Error(ErrorCode::LinearSolveFailure, os.str());
    }
    prev_sup = sup;
  }
  throw Error(ErrorCode::LinearSolveFailure, "frozen-coefficient sweeps did not converge");
}

Solution newton_solve(const Mesh& mesh, double mu, double eps, const ScalarField& start,
                      const NewtonOptions& opts) {
  check_cone_rows(mesh, start, eps);
  const DiscreteOps ops(mesh);
  return newton_core(ops, mu, eps, start, opts, phi_kernel(opts.jacobian_mode));
}

Solution newton_solve_smode(const Mesh& mesh, double mu, double eps,
                            const ScalarField& start_phi, const NewtonOptions& opts) {
  check_cone_rows(mesh, start_phi, eps);
  const DiscreteOps ops(mesh);

  ScalarField start_s(mesh.n_u, mesh.n_v);
  for (int k = 0; k < mesh.size(); ++k) {
    const Vec2 xi = mesh.nodes[k];
    if (geometry::on_cone(mesh.tags[k]))
      start_s.values[k] = s_bc_value(xi, eps);
    else
      start_s.values[k] = fields::s_transform(start_phi.values[k], xi, fields::STransform::to_s);
  }

  NewtonKernel kernel;
  kernel.residual = eval_residual_s;
  kernel.jacobian = [](const DiscreteOps& o, double m, double e, const ScalarField& f) {
    return assemble_colored(o, m, e, f, eval_residual_s);
  };
  Solution s_sol = newton_core(ops, mu, eps, start_s, opts, kernel);

  Solution sol;
  sol.mu = mu;
  sol.eps = eps;
  sol.converged = s_sol.converged;
  sol.residual_history = s_sol.residual_history;
  sol.field = ScalarField(mesh.n_u, mesh.n_v);
  sol.field.mu = mu;
  sol.field.eps = eps;
  for (int k = 0; k < mesh.size(); ++k) {
    if (geometry::on_cone(mesh.tags[k]))
      sol.field.values[k] = cone_value(mesh.nodes[k], eps);
    else
      sol.field.values[k] =
          fields::s_transform(s_sol.field.values[k], mesh.nodes[k], fields::STransform::from_s);
  }
  return sol;
}

namespace {

struct ContinuationState {
  const DiscreteOps* ops;
  const NewtonOptions* opts;
  std::vector<StageRecord>* stages;
  double eps = 0.0;
  double h2 = 0.0;
};

double membership_margin(const Mesh& mesh, const ScalarField& f, double eps) {
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < mesh.size(); ++k)
    margin = std::min(margin, f.values[k] - cone_value(mesh.nodes[k], eps));
  return margin;
}

Solution advance_mu(ContinuationState& st, ScalarField& field, double mu_from, double mu_to,
                    int depth) {
  Solution sol = newton_core(*st.ops, mu_to, st.eps, field, *st.opts,
                             phi_kernel(st.opts->jacobian_mode));
  if (!sol.converged) {
    if (depth >= 4) {
      std::ostringstream os;
      os << "step mu = " << mu_from << " -> " << mu_to << " at eps = " << st.eps
         << " failed after 4 halvings";
      throw Error(ErrorCode::ContinuationStuck, os.str());
    }
    const double mid = 0.5 * (mu_from + mu_to);
    advance_mu(st, field, mu_from, mid, depth + 1);
    return advance_mu(st, field, mid, mu_to, depth + 1);
  }
  field = sol.field;
  StageRecord rec;
  rec.mu = mu_to;
  rec.eps = st.eps;
  rec.iterations = static_cast<int>(sol.residual_history.size()) - 1;
  rec.converged = sol.converged;
  rec.final_residual = sol.residual_history.back();
  rec.membership_margin = membership_margin(st.ops->mesh(), sol.field, st.eps);
  rec.residual_history = sol.residual_history;
  st.stages->push_back(rec);
  return sol;
}

}  // namespace

SweepResult continuation_run(const ProblemConfig& config, const Mesh& mesh) {
  if (config.mu_schedule.empty() || config.eps_schedule.empty())
    throw Error(ErrorCode::BadParameter, "empty continuation schedule");

  const DiscreteOps ops(mesh);
  SweepResult result;

  ContinuationState st;
  st.ops = &ops;
  st.opts = &config.newton;
  st.stages = &result.stages;
  st.h2 = mesh.h() * mesh.h();

  std::vector<ScalarField> mu1_fields;

  Solution seed = initial_guess(mesh, config.eps_schedule.front(), config.newton);
  ScalarField field = seed.field;
  double mu_prev = 0.0;

  for (size_t e = 0; e < config.eps_schedule.size(); ++e) {
    st.eps = config.eps_schedule[e];
    if (e > 0) {
      // Re-lift the Dirichlet rows to the new eps before warm-starting.
      for (int k = 0; k < mesh.size(); ++k)
        if (geometry::on_cone(mesh.tags[k]))
          field.values[k] = cone_value(mesh.nodes[k], st.eps);
    }
    for (double mu : config.mu_schedule) {
      Solution sol = advance_mu(st, field, mu_prev, mu, 0);
      result.solutions.push_back(std::move(sol));
      mu_prev = mu;
    }
    mu1_fields.push_back(field);
  }

  for (size_t e = 1; e < mu1_fields.size(); ++e) {
    double d = 0.0;
    for (int k = 0; k < mesh.size(); ++k)
      d = std::max(d, std::abs(mu1_fields[e].values[k] - mu1_fields[e - 1].values[k]));
    result.cauchy_deltas.push_back(d);
  }

  // First-order eps -> 0 estimate from the last two levels. An estimate
  // only; never used by acceptance gates.
  const size_t ne = config.eps_schedule.size();
  result.extrapolated = mu1_fields.back();
  result.extrapolated.mu = 1.0;
  result.extrapolated.eps = 0.0;
  if (ne >= 2) {
    const double ea = config.eps_schedule[ne - 2];
    const double eb = config.eps_schedule[ne - 1];
    const double f = eb / (ea - eb);
    for (int k = 0; k < mesh.size(); ++k)
      result.extrapolated.values[k] =
          mu1_fields[ne - 1].values[k] +
          f * (mu1_fields[ne - 1].values[k] - mu1_fields[ne - 2].values[k]);
  }
  return result;
}

}  // namespace chaplygin::solver
