// Serial reference kernels against their OpenMP counterparts.
#include "spc/problems.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace spc;

namespace {

const Mesh& mesh_for(int sweeps) {
  static std::map<int, Mesh> cache;
  auto it = cache.find(sweeps);
  if (it == cache.end()) {
    Mesh m = make_initial_mesh(Domain::UnitSquare);
    for (int k = 0; k < sweeps; ++k) m = refine_uniform(m);
    it = cache.emplace(sweeps, std::move(m)).first;
  }
  return it->second;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? Exec::Parallel : Exec::Serial;
}

void set_label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

void BM_Matvec(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const SparseMatrix a = assemble_stiffness(m);
  std::vector<double> x(a.cols(), 1.0), y(a.rows());
  for (auto _ : state) {
    if (state.range(1))
      a.multiply(x, y);
    else
      a.multiply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  set_label(state);
}

void BM_Stiffness(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(m, Space::P1Interior, exec_of(state)));
  set_label(state);
}

void BM_Load(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const auto pr = example1(1e-2, 0.7);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        assemble_load(m, pr.data.f, kHighDegree, Space::P1Interior, exec_of(state)));
  set_label(state);
}

void BM_VdNewton(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const auto pr = example1(1e-2, 0.7);
  NewtonOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_optimality(m, pr.data, Scheme::VD, o));
  set_label(state);
}

}  // namespace

BENCHMARK(BM_Matvec)->ArgsProduct({{8, 12}, {0, 1}});
BENCHMARK(BM_Stiffness)->ArgsProduct({{8, 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Load)->ArgsProduct({{8, 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VdNewton)->ArgsProduct({{8, 10}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
