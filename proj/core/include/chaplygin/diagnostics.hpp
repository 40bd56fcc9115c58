#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaplygin/config.hpp"
#include "chaplygin/solver.hpp"

namespace chaplygin::diagnostics {

using geometry::Domain;
using geometry::Mesh;
using solver::Solution;

struct CheckRecord {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // the worst measured value the check compares
  double threshold = 0.0;  // the bound it is compared against
  int worst_i = -1;
  int worst_j = -1;
  Vec2 worst_xi;
  std::string detail;
};

struct InvariantReport {
  std::vector<CheckRecord> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// L^2 <= 1 + 1e-6 everywhere, L^2 <= 1 - delta_int (delta_int > 0) on the
/// interior band (mapped distance >= 0.1 from the cone edge), and
/// |L^2 - 1| <= C (h + eps) on the cone edge with C = 2.
CheckRecord check_ellipticity(const Solution& solution, const Mesh& mesh);

/// lower - 10 h^2 <= phi <= upper + 10 h^2 nodewise for the given eta family,
/// and the interior envelope margin delta0 > 0. `eps` is the threshold used
/// by the psi-classification (the solver's cone lift divided by v3inf).
CheckRecord check_sandwich(const Solution& solution, const Domain& domain, double eps,
                           std::span<const Vec3> eta_family, const Mesh& mesh);

/// One-sided discrete gradients at P3/P4 against the closed-form corner
/// values implied by the wing and symmetry conditions, within 10 h.
CheckRecord check_corner_gradients(const Solution& solution, const Domain& domain,
                                   const Mesh& mesh);

/// Interior-max exclusion for |Dphi|^2: the argmax lies on the shock edge or
/// the wing edge (one cell of slack), never at an interior or symmetry-edge
/// node; ties resolve in favor of boundary membership.
CheckRecord check_boundary_max(const Solution& solution, const Mesh& mesh);

/// grad_L2 formula against centered differences of the nodal L^2 field on
/// interior nodes (cone-adjacent 2-cell band excluded): relative error
/// <= 1e-2 everywhere tested and median <= 1e-3.
CheckRecord check_grad_L2_identity(const Solution& solution, const Mesh& mesh);

/// All checks on a converged solution, using the default eta family at the
/// rescaled threshold eps/v3inf.
InvariantReport run_all_checks(const Solution& solution, const Domain& domain,
                               const ProblemConfig& config, const Mesh& mesh);

/// Test seam for the closed-form suite: kernels can be overridden to prove
/// the failure path reports the offending check by name.
struct VerifyHooks {
  std::function<double(double, double, Vec2, const Sym2&, Vec2)> interior_residual;
};

/// The solver-free verification suite behind `verify`: critical angle,
/// domain invariants, exact-solution annihilation (seeded random eta),
/// transform round trips, the D(L^2) oracle on a manufactured field, and the
/// Mach-cone characteristic zero.
std::vector<CheckRecord> verify_closed_form(const ProblemConfig& config, unsigned long long seed,
                                            const VerifyHooks& hooks = {});

enum class ExportFormat { csv, json, vtk_legacy };

/// fields.csv: one row per node, header
/// "xi1,xi2,phi,dphi1,dphi2,chi,c2,L2,rho,tag".
void export_csv(const Solution& solution, const Mesh& mesh, double A,
                const std::filesystem::path& path);

/// report.json: invariant report, config echo and residual histories.
/// Deterministic: no timestamps.
void export_report_json(const InvariantReport& report, const ProblemConfig& config,
                        const Solution& solution,
                        std::span<const solver::StageRecord> stages,
                        const std::filesystem::path& path);

/// ASCII legacy-VTK structured grid with the same point data as the csv.
void export_vtk(const Solution& solution, const Mesh& mesh, double A,
                const std::filesystem::path& path);

/// shock.csv: 3-D shock-surface polyline sampled at x3 = 1, header "x1,x2,x3".
void export_shock_csv(const ProblemConfig& config, int n, const std::filesystem::path& path);

/// Dispatch on format; csv/vtk write the field file, json writes the report.
void export_solution(const Solution& solution, const InvariantReport& report,
                     const Mesh& mesh, const ProblemConfig& config,
                     std::span<const solver::StageRecord> stages, ExportFormat format,
                     const std::filesystem::path& path);

}  // namespace chaplygin::diagnostics
