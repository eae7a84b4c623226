// Microbenchmarks for the numerical kernels.
#include <benchmark/benchmark.h>

#include "nodallab/distance_transform.hpp"
#include "nodallab/eigensolve.hpp"
#include "nodallab/grid.hpp"
#include "nodallab/harmonic.hpp"
#include "nodallab/laplacian.hpp"
#include "nodallab/poincare.hpp"
#include "nodallab/rng.hpp"

using namespace nodallab;

static void BM_LaplacianApply(benchmark::State& state) {
  const GridDomain d = build_domain(DomainKind::square, static_cast<int>(state.range(0)));
  const SparseSymOp op = assemble_laplacian(d);
  Eigen::VectorXd u(op.n());
  CounterRng rng(1, 0);
  for (std::int64_t i = 0; i < op.n(); ++i) u[i] = rng.next_in(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.apply(u));
  }
  state.SetItemsProcessed(state.iterations() * op.n());
}
BENCHMARK(BM_LaplacianApply)->Arg(129)->Arg(257)->Arg(513);

static void BM_GroundState(benchmark::State& state) {
  const GridDomain d = build_domain(DomainKind::square, static_cast<int>(state.range(0)));
  const SparseSymOp op = assemble_laplacian(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smallest_eigenpairs(op, 1));
  }
}
BENCHMARK(BM_GroundState)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

static void BM_TwentyPairs(benchmark::State& state) {
  const GridDomain d = build_domain(DomainKind::square, static_cast<int>(state.range(0)));
  const SparseSymOp op = assemble_laplacian(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smallest_eigenpairs(op, 20));
  }
}
BENCHMARK(BM_TwentyPairs)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

static void BM_DistanceTransform(benchmark::State& state) {
  const GridDomain d = build_domain(DomainKind::disk, static_cast<int>(state.range(0)));
  std::vector<std::uint8_t> feature(static_cast<std::size_t>(d.n_nodes()), 0);
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (!d.active(id)) feature[static_cast<std::size_t>(id)] = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance_sq_to_features(d, feature));
  }
}
BENCHMARK(BM_DistanceTransform)->Arg(257)->Arg(513)->Unit(benchmark::kMillisecond);

static void BM_WalkOnSpheres(benchmark::State& state) {
  const ObstacleSet e = ObstacleSet::radial_slit(0.1);
  WosOptions opt;
  opt.n_samples = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(harmonic_measure_at_zero(e, opt));
  }
  state.SetItemsProcessed(state.iterations() * opt.n_samples);
}
BENCHMARK(BM_WalkOnSpheres)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_CapacitySolve(benchmark::State& state) {
  const CapacityProblem p =
      annulus_capacity_problem(2, static_cast<int>(state.range(0)), 0.25, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_capacity(p));
  }
}
BENCHMARK(BM_CapacitySolve)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

static void BM_Beta3D(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(measure_beta_point(3, static_cast<int>(state.range(0)), 0.125));
  }
}
BENCHMARK(BM_Beta3D)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
