#include <benchmark/benchmark.h>

#include <memory>

#include "nanoplate/discretization.hpp"
#include "nanoplate/harness.hpp"
#include "nanoplate/inverse.hpp"
#include "nanoplate/norms.hpp"
#include "nanoplate/solver.hpp"

namespace {

using namespace nanoplate;

MaterialParams unit_material() {
  MaterialParams m;
  m.mu = std::make_shared<ConstantField>(1.0);
  m.lambda = std::make_shared<ConstantField>(1.0);
  return m;
}

void BM_AssembleStiffness(benchmark::State& state) {
  const SpacePtr s = build_space(PlateDomain{}, 5, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const MaterialParams m = unit_material();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(*s, m));
  state.counters["dofs"] = static_cast<double>(s->num_active());
}
BENCHMARK(BM_AssembleStiffness)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveDirect(benchmark::State& state) {
  const SpacePtr s = build_space(PlateDomain{}, 5, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const SparseMatrix K = assemble_stiffness(*s, unit_material());
  const SparseMatrix M = assemble_kappa_mass(*s, ConstantField(2.0));
  const LoadCase load;
  const Eigen::VectorXd F = point_load_vector(*s, load.P0, load.f(1.0), load.d);
  for (auto _ : state) benchmark::DoNotOptimize(solve_system(K, M, F));
}
BENCHMARK(BM_SolveDirect)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const ExperimentConfig cfg = default_experiment();
  const Experiment ex(cfg);
  const Deflection w = ex.solve(*cfg.kappa.make(cfg.domain));
  ReconstructionOptions ro;
  ro.exclusion_radius = 0.05;
  for (auto _ : state)
    benchmark::DoNotOptimize(reconstruct_kappa(w, cfg.load, cfg.material, ex.coef_space(), 1e-8, ro));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

void BM_FractionalSeminorm(benchmark::State& state) {
  const Region square = Region::rectangle({0.0, 0.0, 1.0, 1.0});
  const auto f = std::make_shared<FunctionField>(
      [](Point p, int order) {
        Partials d(order);
        d(0, 0) = p.x * p.y;
        if (order >= 1) {
          d(1, 0) = p.y;
          d(0, 1) = p.x;
        }
        if (order >= 2) d(1, 1) = 1.0;
        return d;
      },
      Partials::kMaxOrder);
  for (auto _ : state) benchmark::DoNotOptimize(fractional_seminorm(*f, 0.5, square));
}
BENCHMARK(BM_FractionalSeminorm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
