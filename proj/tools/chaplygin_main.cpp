// Command-line front end: solve / verify / sweep.
//
// Exit codes: 0 success, 2 config error, 3 solver or I/O failure,
// 4 verification checks failed (artifacts still written).

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaplygin/diagnostics.hpp"
#include "chaplygin/errors.hpp"
#include "chaplygin/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace chaplygin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitChecks = 4;

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  ordered_json stages = ordered_json::array();
  std::vector<std::string> outputs;
  std::string started = timestamp_now();

  void stage(const std::string& name, const std::string& status, const std::string& error = "") {
    ordered_json s{{"name", name}, {"status", status}};
    if (!error.empty()) s["error"] = error;
    stages.push_back(s);
  }

  // Atomic write: temp file in the same directory, then rename.
  void write(const fs::path& dir, const ProblemConfig* config) const {
    ordered_json j;
    j["version"] = kVersion;
    if (config) j["config"] = ordered_json::parse(config_to_json(*config));
    j["started"] = started;
    j["finished"] = timestamp_now();
    j["stages"] = stages;
    j["outputs"] = outputs;
    const fs::path tmp = dir / "manifest.json.tmp";
    const fs::path final_path = dir / "manifest.json";
    std::ofstream out(tmp);
    if (!out) return;  // manifest is best-effort; the primary exit code already stands
    out << j.dump(2) << '\n';
    out.close();
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
  }
};

ProblemConfig load_and_override(const std::string& config_path, int grid_override) {
  ProblemConfig config = load_config(config_path);
  if (grid_override > 0) {
    config.grid.n_u = grid_override;
    config.grid.n_v = grid_override;
    validate_config(config);
  }
  return config;
}

int run_solve(const std::string& config_path, const std::string& out_dir, int grid_override) {
  Manifest manifest;
  ProblemConfig config;
  try {
    config = load_and_override(config_path, grid_override);
    manifest.stage("config", "ok");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    std::cerr << "IoFailure: cannot create output directory " << out << "\n";
    return kExitSolver;
  }

  geometry::Domain domain;
  geometry::Mesh mesh;
  solver::SweepResult sweep;
  try {
    domain = geometry::build_domain(config);
    mesh = geometry::build_mesh(domain, config.grid.n_u, config.grid.n_v);
    manifest.stage("mesh", "ok");
    sweep = solver::continuation_run(config, mesh);
    manifest.stage("continuation", "ok");
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    manifest.stage("continuation", "failed", e.what());
    manifest.write(out, &config);
    return kExitSolver;
  }

  const solver::Solution& final_sol = sweep.solutions.back();
  diagnostics::InvariantReport report;
  try {
    report = diagnostics::run_all_checks(final_sol, domain, config, mesh);
    manifest.stage("checks", report.all_pass() ? "ok" : "failed");
  } catch (const std::exception& e) {
    std::cerr << "diagnostics error: " << e.what() << "\n";
    manifest.stage("checks", "failed", e.what());
    manifest.write(out, &config);
    return kExitSolver;
  }

  try {
    diagnostics::export_csv(final_sol, mesh, config.chaplygin_A, out / "fields.csv");
    manifest.outputs.push_back((out / "fields.csv").string());
    diagnostics::export_report_json(report, config, final_sol, sweep.stages,
                                    out / "report.json");
    manifest.outputs.push_back((out / "report.json").string());
    diagnostics::export_vtk(final_sol, mesh, config.chaplygin_A, out / "fields.vtk");
    manifest.outputs.push_back((out / "fields.vtk").string());
    diagnostics::export_shock_csv(config, 128, out / "shock.csv");
    manifest.outputs.push_back((out / "shock.csv").string());
    manifest.stage("export", "ok");
  } catch (const std::exception& e) {
    std::cerr << "export error: " << e.what() << "\n";
    manifest.stage("export", "failed", e.what());
    manifest.write(out, &config);
    return kExitSolver;
  }

  manifest.write(out, &config);

  for (const auto& c : report.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  " << c.detail << "\n";
  if (!report.all_pass()) {
    std::cerr << "verification checks failed; artifacts written to " << out << "\n";
    return kExitChecks;
  }
  std::cout << "solve ok; artifacts written to " << out << "\n";
  return kExitOk;
}

int run_verify(const std::string& config_path, int grid_override, unsigned long long seed) {
  ProblemConfig config;
  try {
    config = load_and_override(config_path, grid_override);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto checks = diagnostics::verify_closed_form(config, seed);
  bool all = true;
  std::cout << std::left << std::setw(32) << "check" << std::setw(8) << "status"
            << "measured (threshold)\n";
  for (const auto& c : checks) {
    all = all && c.pass;
    std::ostringstream meas;
    meas.precision(17);
    meas << c.measured << " (" << c.threshold << ")";
    std::cout << std::left << std::setw(32) << c.name << std::setw(8)
              << (c.pass ? "PASS" : "FAIL") << meas.str() << "\n";
    if (!c.detail.empty()) std::cout << "    " << c.detail << "\n";
  }
  return all ? kExitOk : 1;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, int grid_override) {
  Manifest manifest;
  ProblemConfig config;
  try {
    config = load_and_override(config_path, grid_override);
    if (config.eps_schedule.size() < 3)
      throw Error(ErrorCode::BadParameter, "sweep needs an eps_schedule of length >= 3");
    manifest.stage("config", "ok");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    std::cerr << "IoFailure: cannot create output directory " << out << "\n";
    return kExitSolver;
  }

  geometry::Domain domain;
  geometry::Mesh mesh;
  solver::SweepResult sweep;
  try {
    domain = geometry::build_domain(config);
    mesh = geometry::build_mesh(domain, config.grid.n_u, config.grid.n_v);
    sweep = solver::continuation_run(config, mesh);
    manifest.stage("continuation", "ok");
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    manifest.stage("continuation", "failed", e.what());
    manifest.write(out, &config);
    return kExitSolver;
  }

  try {
    {
      std::ofstream cauchy(out / "cauchy.csv");
      if (!cauchy) throw Error(ErrorCode::IoFailure, "cannot write cauchy.csv");
      cauchy << "eps,sup_delta\n";
      cauchy.precision(17);
      for (size_t k = 0; k + 1 < config.eps_schedule.size(); ++k)
        cauchy << config.eps_schedule[k + 1] << ',' << sweep.cauchy_deltas[k] << '\n';
      manifest.outputs.push_back((out / "cauchy.csv").string());
    }

    const size_t n_mu = config.mu_schedule.size();
    for (size_t e = 0; e < config.eps_schedule.size(); ++e) {
      const auto& sol = sweep.solutions[(e + 1) * n_mu - 1];
      std::ostringstream name;
      name << "fields_eps_" << config.eps_schedule[e] << ".csv";
      diagnostics::export_csv(sol, mesh, config.chaplygin_A, out / name.str());
      manifest.outputs.push_back((out / name.str()).string());
    }

    {
      std::ofstream ex(out / "extrapolated.csv");
      if (!ex) throw Error(ErrorCode::IoFailure, "cannot write extrapolated.csv");
      ex << "# first-order eps->0 extrapolation estimate; not a solver output\n";
      ex << "xi1,xi2,phi\n";
      ex.precision(17);
      for (int j = 0; j < mesh.n_v; ++j)
        for (int i = 0; i < mesh.n_u; ++i) {
          const Vec2 xi = mesh.node(i, j);
          ex << xi.x1 << ',' << xi.x2 << ',' << sweep.extrapolated.at(i, j) << '\n';
        }
      manifest.outputs.push_back((out / "extrapolated.csv").string());
    }
    manifest.stage("export", "ok");
  } catch (const std::exception& e) {
    std::cerr << "export error: " << e.what() << "\n";
    manifest.stage("export", "failed", e.what());
    manifest.write(out, &config);
    return kExitSolver;
  }

  bool decreasing = true;
  for (size_t k = 1; k < sweep.cauchy_deltas.size(); ++k)
    decreasing = decreasing && sweep.cauchy_deltas[k] < sweep.cauchy_deltas[k - 1];
  manifest.stage("cauchy_decrease", decreasing ? "ok" : "failed");
  manifest.write(out, &config);

  std::cout << "cauchy deltas:";
  for (double d : sweep.cauchy_deltas) std::cout << ' ' << d;
  std::cout << (decreasing ? "  (strictly decreasing)" : "  (NOT strictly decreasing)") << "\n";
  return decreasing ? kExitOk : kExitChecks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar supersonic Chaplygin-gas flow past a diamond conical wing"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int grid_override = 0;
  unsigned long long seed = 0;

  auto* solve = app.add_subcommand("solve", "continuation solve + checks + exports");
  solve->add_option("--config", config_path, "config JSON path")->required();
  solve->add_option("--out", out_dir, "output directory")->required();
  solve->add_option("--grid", grid_override, "override grid to N x N");

  auto* verify = app.add_subcommand("verify", "solver-free closed-form checks");
  verify->add_option("--config", config_path, "config JSON path")->required();
  verify->add_option("--grid", grid_override, "override grid to N x N");
  verify->add_option("--seed", seed, "seed for random-eta tests");

  auto* sweep = app.add_subcommand("sweep", "vanishing-viscosity sweep with Cauchy record");
  sweep->add_option("--config", config_path, "config JSON path")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--grid", grid_override, "override grid to N x N");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(config_path, out_dir, grid_override);
    if (verify->parsed()) return run_verify(config_path, grid_override, seed);
    if (sweep->parsed()) return run_sweep(config_path, out_dir, grid_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
