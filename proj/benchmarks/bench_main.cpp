#include <surfmg/decimate.hpp>
#include <surfmg/fem.hpp>
#include <surfmg/multigrid.hpp>
#include <surfmg/relaxation.hpp>
#include <surfmg/selfparam.hpp>
#include <surfmg/shapes.hpp>
#include <surfmg/sparse.hpp>

#include <benchmark/benchmark.h>

#include <map>

using namespace surfmg;

namespace {

// Built once per subdivision level and reused across benchmarks.
struct Fixture {
  SurfaceMesh mesh;
  SparseMatrix laplacian;
  Hierarchy hierarchy;
};

const Fixture& fixture(int level) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(level);
  if (it == cache.end()) {
    SurfaceMesh m = shapes::icosphere(level);
    HierarchyConfig cfg;
    cfg.min_vertices = 100;
    Hierarchy h = build_hierarchy(m, cfg);
    SparseMatrix l = add(cotan_laplacian(m), lumped_mass(m), 1.0, 1e-2);
    it = cache.emplace(level, Fixture{std::move(m), std::move(l), std::move(h)}).first;
  }
  return it->second;
}

void BM_Spmv(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  Vector x = Vector::Ones(f.laplacian.rows());
  for (auto _ : state) benchmark::DoNotOptimize(spmv(f.laplacian, x));
  state.SetItemsProcessed(state.iterations() * f.laplacian.nnz());
}
BENCHMARK(BM_Spmv)->DenseRange(3, 5);

void BM_GalerkinTriple(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const SparseMatrix& p = f.hierarchy.prolongations.front();
  for (auto _ : state) benchmark::DoNotOptimize(galerkin_triple(p, f.laplacian));
}
BENCHMARK(BM_GalerkinTriple)->DenseRange(3, 5);

void BM_GaussSeidel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  Vector b = Vector::Ones(f.laplacian.rows());
  Vector x = Vector::Zero(f.laplacian.rows());
  for (auto _ : state) gauss_seidel(f.laplacian, x, b, 1);
}
BENCHMARK(BM_GaussSeidel)->DenseRange(3, 5);

void BM_ColoredGaussSeidel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  ColoredGaussSeidel cgs(f.laplacian);
  Vector b = Vector::Ones(f.laplacian.rows());
  Vector x = Vector::Zero(f.laplacian.rows());
  for (auto _ : state) cgs.relax(x, b, 1, 1);
}
BENCHMARK(BM_ColoredGaussSeidel)->DenseRange(3, 5);

void BM_VCycle(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  LevelStack stack = setup(f.laplacian, f.hierarchy);
  Vector b = Vector::Ones(f.laplacian.rows());
  SolverConfig cfg;
  for (auto _ : state) {
    Vector x = Vector::Zero(b.size());
    vcycle(stack, x, b, 0, cfg);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_VCycle)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_Decimate(benchmark::State& state) {
  SurfaceMesh m = shapes::icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decimate(m, m.num_vertices() / 4));
}
BENCHMARK(BM_Decimate)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
