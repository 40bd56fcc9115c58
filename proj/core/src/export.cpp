#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chaplygin/diagnostics.hpp"
#include "chaplygin/errors.hpp"
#include "chaplygin/stencils.hpp"
#include "chaplygin/version.hpp"

namespace chaplygin::diagnostics {

namespace {

using geometry::BoundaryTag;
using nlohmann::ordered_json;
using solver::DiscreteOps;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::interior: return "interior";
    case BoundaryTag::cone: return "cone";
    case BoundaryTag::py: return "py";
    case BoundaryTag::sy1: return "sy1";
    case BoundaryTag::sy2: return "sy2";
    case BoundaryTag::corner_p1: return "corner(P1)";
    case BoundaryTag::corner_p2: return "corner(P2)";
    case BoundaryTag::corner_p3: return "corner(P3)";
    case BoundaryTag::corner_p4: return "corner(P4)";
  }
  return "unknown";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failure on " + path.string());
}

struct NodeRow {
  Vec2 xi, dphi;
  double phi, chi, c2, L2, rho;
};

NodeRow node_row(const DiscreteOps& ops, const Solution& sol, double A, int i, int j) {
  NodeRow r;
  const Mesh& mesh = ops.mesh();
  r.xi = mesh.node(i, j);
  r.phi = sol.field.at(i, j);
  r.dphi = ops.gradient(sol.field, i, j);
  const auto st = fields::derived_state(r.phi, r.dphi, r.xi, A);
  r.chi = st.chi;
  r.c2 = st.c2;
  r.L2 = st.L2;
  r.rho = st.rho;
  return r;
}

}  // namespace

void export_csv(const Solution& solution, const Mesh& mesh, double A,
                const std::filesystem::path& path) {
  const DiscreteOps ops(mesh);
  auto out = open_out(path);
  out << "xi1,xi2,phi,dphi1,dphi2,chi,c2,L2,rho,tag\n";
  for (int j = 0; j < mesh.n_v; ++j)
    for (int i = 0; i < mesh.n_u; ++i) {
      const NodeRow r = node_row(ops, solution, A, i, j);
      out << g17(r.xi.x1) << ',' << g17(r.xi.x2) << ',' << g17(r.phi) << ',' << g17(r.dphi.x1)
          << ',' << g17(r.dphi.x2) << ',' << g17(r.chi) << ',' << g17(r.c2) << ',' << g17(r.L2)
          << ',' << g17(r.rho) << ',' << tag_name(mesh.tag(i, j)) << '\n';
    }
  finish(out, path);
}

void export_vtk(const Solution& solution, const Mesh& mesh, double A,
                const std::filesystem::path& path) {
  const DiscreteOps ops(mesh);
  auto out = open_out(path);
  const int n = mesh.size();
  out << "# vtk DataFile Version 3.0\n";
  out << "conical Chaplygin flow fields (mu=" << g17(solution.mu) << ", eps=" << g17(solution.eps)
      << ")\n";
  out << "ASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << mesh.n_u << ' ' << mesh.n_v << " 1\n";
  out << "POINTS " << n << " double\n";
  for (int j = 0; j < mesh.n_v; ++j)
    for (int i = 0; i < mesh.n_u; ++i) {
      const Vec2 xi = mesh.node(i, j);
      out << g17(xi.x1) << ' ' << g17(xi.x2) << " 0\n";
    }
  out << "POINT_DATA " << n << "\n";

  auto scalar = [&](const char* name, auto get) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < mesh.n_v; ++j)
      for (int i = 0; i < mesh.n_u; ++i) out << g17(get(node_row(ops, solution, A, i, j))) << '\n';
  };
  scalar("phi", [](const NodeRow& r) { return r.phi; });
  scalar("chi", [](const NodeRow& r) { return r.chi; });
  scalar("c2", [](const NodeRow& r) { return r.c2; });
  scalar("L2", [](const NodeRow& r) { return r.L2; });
  scalar("rho", [](const NodeRow& r) { return r.rho; });
  out << "VECTORS dphi double\n";
  for (int j = 0; j < mesh.n_v; ++j)
    for (int i = 0; i < mesh.n_u; ++i) {
      const NodeRow r = node_row(ops, solution, A, i, j);
      out << g17(r.dphi.x1) << ' ' << g17(r.dphi.x2) << " 0\n";
    }
  finish(out, path);
}

void export_shock_csv(const ProblemConfig& config, int n, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "x1,x2,x3\n";
  for (const Vec3& p : geometry::shock_cone_sample(config, n))
    out << g17(p.x1) << ',' << g17(p.x2) << ',' << g17(p.x3) << '\n';
  finish(out, path);
}

void export_report_json(const InvariantReport& report, const ProblemConfig& config,
                        const Solution& solution,
                        std::span<const solver::StageRecord> stages,
                        const std::filesystem::path& path) {
  ordered_json j;
  j["version"] = kVersion;
  j["config"] = ordered_json::parse(config_to_json(config));
  j["solution"] = {{"mu", solution.mu},
                   {"eps", solution.eps},
                   {"converged", solution.converged},
                   {"grid", {{"n_u", config.grid.n_u}, {"n_v", config.grid.n_v}}},
                   {"residual_history", solution.residual_history}};
  j["stages"] = ordered_json::array();
  for (const auto& s : stages) {
    j["stages"].push_back({{"mu", s.mu},
                           {"eps", s.eps},
                           {"iterations", s.iterations},
                           {"converged", s.converged},
                           {"final_residual", s.final_residual},
                           {"membership_margin", s.membership_margin},
                           {"residual_history", s.residual_history}});
  }
  j["checks"] = ordered_json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"measured", c.measured},
                           {"threshold", c.threshold},
                           {"worst_node",
                            {{"i", c.worst_i},
                             {"j", c.worst_j},
                             {"xi1", c.worst_xi.x1},
                             {"xi2", c.worst_xi.x2}}},
                           {"detail", c.detail}});
  }
  j["pass"] = report.all_pass();

  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void export_solution(const Solution& solution, const InvariantReport& report, const Mesh& mesh,
                     const ProblemConfig& config, std::span<const solver::StageRecord> stages,
                     ExportFormat format, const std::filesystem::path& path) {
  switch (format) {
    case ExportFormat::csv:
      export_csv(solution, mesh, config.chaplygin_A, path);
      return;
    case ExportFormat::vtk_legacy:
      export_vtk(solution, mesh, config.chaplygin_A, path);
      return;
    case ExportFormat::json:
      export_report_json(report, config, solution, stages, path);
      return;
  }
  throw Error(ErrorCode::BadParameter, "unknown export format");
}

}  // namespace chaplygin::diagnostics
