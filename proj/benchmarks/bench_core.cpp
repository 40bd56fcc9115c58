#include <benchmark/benchmark.h>

#include <Eigen/SparseLU>
#include <numbers>

#include "chaplygin/solver.hpp"

using namespace chaplygin;

namespace {

geometry::Domain bench_domain() {
  return geometry::build_domain(std::numbers::pi / 6.0, std::numbers::pi / 6.0, 2.0);
}

ScalarField start_field(const geometry::Mesh& mesh, double eps) {
  ScalarField f(mesh.n_u, mesh.n_v);
  for (int k = 0; k < mesh.size(); ++k)
    f.values[k] = std::max(2.0, std::sqrt(1.0 + norm2(mesh.nodes[k])) + eps);
  return f;
}

void BM_BuildMesh(benchmark::State& state) {
  const auto d = bench_domain();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::build_mesh(d, n, n));
}
BENCHMARK(BM_BuildMesh)->Arg(65)->Arg(129);

void BM_DiscreteOps(benchmark::State& state) {
  const auto d = bench_domain();
  const auto mesh = geometry::build_mesh(d, static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solver::DiscreteOps(mesh));
}
BENCHMARK(BM_DiscreteOps)->Arg(65)->Arg(129);

void BM_ResidualAssembly(benchmark::State& state) {
  const auto d = bench_domain();
  const auto mesh = geometry::build_mesh(d, static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(0)));
  const solver::DiscreteOps ops(mesh);
  const ScalarField f = start_field(mesh, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(solver::discrete_residual(ops, 1.0, 0.1, f));
}
BENCHMARK(BM_ResidualAssembly)->Arg(65)->Arg(129);

void BM_JacobianAnalytic(benchmark::State& state) {
  const auto d = bench_domain();
  const auto mesh = geometry::build_mesh(d, static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(0)));
  const solver::DiscreteOps ops(mesh);
  const ScalarField f = start_field(mesh, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solver::assemble_jacobian(ops, 1.0, 0.1, f, JacobianMode::analytic));
}
BENCHMARK(BM_JacobianAnalytic)->Arg(65)->Arg(129);

void BM_SparseFactorSolve(benchmark::State& state) {
  const auto d = bench_domain();
  const auto mesh = geometry::build_mesh(d, static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(0)));
  const solver::DiscreteOps ops(mesh);
  const ScalarField f = start_field(mesh, 0.1);
  const auto jac = solver::assemble_jacobian(ops, 1.0, 0.1, f, JacobianMode::analytic);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(mesh.size());
  for (auto _ : state) {
    Eigen::SparseLU<solver::SparseMatrix> lu;
    lu.compute(jac);
    benchmark::DoNotOptimize(lu.solve(rhs));
  }
}
BENCHMARK(BM_SparseFactorSolve)->Arg(65)->Arg(129);

void BM_InitialGuess(benchmark::State& state) {
  const auto d = bench_domain();
  const auto mesh = geometry::build_mesh(d, static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(0)));
  NewtonOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(solver::initial_guess(mesh, 0.1, opts));
}
BENCHMARK(BM_InitialGuess)->Arg(33)->Arg(65);

}  // namespace

BENCHMARK_MAIN();
