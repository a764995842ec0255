#include "rigidlab/duality_lab.hpp"
#include "rigidlab/gauss_rigidity.hpp"
#include "rigidlab/reconstruction_solvers.hpp"
#include "rigidlab/solids.hpp"
#include "rigidlab/warped_metric.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace rigidlab;

static void BM_JacobiEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  MatX m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  const SymMatrix s = SymMatrix::symmetrized(m);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(s));
}
BENCHMARK(BM_JacobiEigen)->Arg(8)->Arg(32)->Arg(128);

static void BM_GaussVerdict(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const SupportPolyhedron s = with_combinatorics(to_support(solids::random_simple(static_cast<int>(state.range(0)), rng)));
  const Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(gauss_verdict(s, tol));
}
BENCHMARK(BM_GaussVerdict)->Arg(8)->Arg(16)->Arg(32);

static void BM_MetricVerdict(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const WarpedPolyhedron w = build(triangulate(solids::random_simplicial(static_cast<int>(state.range(0)), rng)), Vec3::Zero());
  const Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(metric_verdict(w, tol));
}
BENCHMARK(BM_MetricVerdict)->Arg(8)->Arg(16)->Arg(32);

static void BM_HessianDuality(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const VertexPolyhedron p = solids::random_simplicial(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(hessian_duality(p));
}
BENCHMARK(BM_HessianDuality)->Arg(8)->Arg(16);

static void BM_SampleVolumes(benchmark::State& state) {
  const SphericalPolytope p = spherical_cube(0.5);
  const SphericalPolytope pd = dual(p);
  for (auto _ : state) benchmark::DoNotOptimize(sample_volumes(p, pd, static_cast<std::uint64_t>(state.range(0)), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleVolumes)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_MinkowskiBox(benchmark::State& state) {
  MinkowskiProblem mp;
  for (int k = 0; k < 3; ++k) {
    mp.normals.push_back(Vec3::Unit(k));
    mp.normals.push_back(-Vec3::Unit(k));
  }
  mp.areas = (VecX(6) << 4, 4, 1, 1, 1, 1).finished();
  for (auto _ : state) benchmark::DoNotOptimize(minkowski_solve(mp));
}
BENCHMARK(BM_MinkowskiBox);

static void BM_AlexandrovIcosahedron(benchmark::State& state) {
  AlexandrovProblem ap = alexandrov_problem(solids::icosahedron(), Vec3::Zero());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int i = 0; i < ap.r_init.size(); ++i) ap.r_init[i] *= 1.0 + u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(alexandrov_continuation(ap));
}
BENCHMARK(BM_AlexandrovIcosahedron);

BENCHMARK_MAIN();
