#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "chaplygin/config.hpp"
#include "chaplygin/fields.hpp"
#include "chaplygin/geometry.hpp"
#include "chaplygin/stencils.hpp"
#include "chaplygin/types.hpp"

namespace chaplygin::solver {

using geometry::Mesh;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct Solution {
  ScalarField field;
  double mu = 0.0;
  double eps = 0.0;
  bool converged = false;
  std::vector<double> residual_history;  // sup-norms, including the initial one
};

struct StageRecord {
  double mu = 0.0;
  double eps = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  double membership_margin = 0.0;  // min of phi - (sqrt(1+|xi|^2)+eps); failures are < -10 h^2
  std::vector<double> residual_history;
};

struct SweepResult {
  std::vector<Solution> solutions;      // one per scheduled (mu, eps) pair
  std::vector<StageRecord> stages;      // includes automatic halving stages
  std::vector<double> cauchy_deltas;    // sup-norm gaps between consecutive eps at mu=1
  ScalarField extrapolated;             // first-order eps->0 estimate; an estimate only
};

/// Nodal residual of the discrete mu-family problem: interior rows evaluate
/// the interior kernel with stencil gradients/Hessians, cone rows are
/// phi - sqrt(1+|xi|^2) - eps, wing/symmetry rows are the one-sided oblique
/// and normal-derivative conditions. Corner rows at P3/P4 impose the wing
/// condition.
std::vector<double> discrete_residual(const Mesh& mesh, double mu, double eps,
                                      const ScalarField& field);
std::vector<double> discrete_residual(const DiscreteOps& ops, double mu, double eps,
                                      const ScalarField& field);

/// Jacobian of discrete_residual with respect to the nodal values; analytic
/// kernels or colored one-sided differences with step 1e-7 (1+|value|).
SparseMatrix assemble_jacobian(const Mesh& mesh, double mu, double eps,
                               const ScalarField& field, JacobianMode mode);
SparseMatrix assemble_jacobian(const DiscreteOps& ops, double mu, double eps,
                               const ScalarField& field, JacobianMode mode);

/// Solve the mu = 0 problem by frozen-coefficient sweeps from the start
/// field max(v3inf, sqrt(1+|xi|^2)+eps). Throws LinearSolveFailure if the
/// sweeps stall.
Solution initial_guess(const Mesh& mesh, double eps, const NewtonOptions& opts);

/// Damped Newton iteration at fixed (mu, eps). The start field must satisfy
/// the cone Dirichlet rows exactly; they are preserved exactly by every
/// step. Throws SingularJacobian when the factorization fails and Diverged
/// when the residual stops being finite.
Solution newton_solve(const Mesh& mesh, double mu, double eps, const ScalarField& start,
                      const NewtonOptions& opts);

/// Cross-check mode: the same problem solved in the variable s, with
/// phi = sqrt(1+|xi|^2) cosh s, using colored-difference Jacobians of the
/// s-form kernel, returned converted back to phi.
Solution newton_solve_smode(const Mesh& mesh, double mu, double eps,
                            const ScalarField& start_phi, const NewtonOptions& opts);

/// Warm-started continuation over eps_schedule (outer) and mu_schedule
/// (inner) with automatic local mu-step halving (up to 4). Throws
/// ContinuationStuck if a step cannot be completed.
SweepResult continuation_run(const ProblemConfig& config, const Mesh& mesh);

}  // namespace chaplygin::solver
