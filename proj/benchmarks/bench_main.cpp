// Microbenchmarks for the solver-facing primitives: HS projection, the
// certified norm bracket, lattice closure and the commutant minimax.
#include <benchmark/benchmark.h>

#include <random>

#include "vfnorm/algebra.hpp"
#include "vfnorm/funcnorm.hpp"
#include "vfnorm/halmos.hpp"
#include "vfnorm/verify.hpp"

using namespace vfnorm;

namespace {

SubspaceLattice bench_nest(Index dim) {
  std::vector<Projection> elems;
  for (Index k = 1; k < dim; ++k) {
    CMatrix d = CMatrix::Zero(dim, dim);
    for (Index i = 0; i < k; ++i) d(i, i) = 1.0;
    elems.push_back(Projection{d, static_cast<int>(k)});
  }
  return SubspaceLattice::from_elements(dim, std::move(elems));
}

}  // namespace

static void BM_HsProjectCsl(benchmark::State& state) {
  const Index n = state.range(0);
  const AlgebraModel a = AlgebraModel::csl(bench_nest(n));
  std::mt19937_64 rng(1);
  const CMatrix m = random_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hs_project(a, m));
}
BENCHMARK(BM_HsProjectCsl)->Arg(4)->Arg(8)->Arg(16);

static void BM_FunctionalNormFull(benchmark::State& state) {
  const Index n = state.range(0);
  const AlgebraModel a = AlgebraModel::full(n);
  std::mt19937_64 rng(2);
  const CVector x = random_unit_vector(n, rng);
  const CVector y = random_unit_vector(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(functional_norm(a, x, y));
}
BENCHMARK(BM_FunctionalNormFull)->Arg(4)->Arg(8);

static void BM_FunctionalNormNest(benchmark::State& state) {
  const Index n = state.range(0);
  const AlgebraModel a = AlgebraModel::csl(bench_nest(n));
  std::mt19937_64 rng(3);
  const CVector x = random_unit_vector(n, rng);
  const CVector y = random_unit_vector(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(functional_norm(a, x, y));
}
BENCHMARK(BM_FunctionalNormNest)->Arg(4)->Arg(8);

static void BM_LatticeClosureHalmos(benchmark::State& state) {
  CMatrix b = CMatrix::Zero(3, 3);
  b(0, 0) = 0.9;
  b(1, 1) = 0.6;
  b(2, 2) = 0.3;
  const HalmosModel hm = build_halmos(b);
  for (auto _ : state)
    benchmark::DoNotOptimize(lattice_closure({hm.proj_p, hm.proj_q}, 16));
}
BENCHMARK(BM_LatticeClosureHalmos);

static void BM_LatInfVn(benchmark::State& state) {
  const AlgebraModel a = AlgebraModel::block_von_neumann({{2, 2}, {1, 4}});
  std::mt19937_64 rng(4);
  const CVector x = random_unit_vector(8, rng);
  const CVector y = random_unit_vector(8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lat_inf_vn(a, x, y));
}
BENCHMARK(BM_LatInfVn);

BENCHMARK_MAIN();
