#include <benchmark/benchmark.h>

#include "oblivsim/analysis.hpp"
#include "oblivsim/machine.hpp"
#include "oblivsim/point.hpp"
#include "oblivsim/rng.hpp"
#include "oblivsim/structures.hpp"

namespace {

using namespace oblivsim;

Point random_point(unsigned d, Rng& rng) {
  Point p(d);
  for (unsigned j = 0; j < d; ++j) p.set(j, rng.bit());
  return p;
}

void BM_hamming(benchmark::State& state) {
  unsigned d = static_cast<unsigned>(state.range(0));
  Rng rng(7);
  Point a = random_point(d, rng);
  Point b = random_point(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hamming(a, b));
}
BENCHMARK(BM_hamming)->Arg(64)->Arg(1024);

void BM_machine_probes(benchmark::State& state) {
  uint64_t cells = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    Machine machine(cells, 32, 64, 7);
    machine.begin_operation();
    for (uint64_t i = 0; i < cells; ++i) machine.write(i, i);
    for (uint64_t i = 0; i < cells; ++i) benchmark::DoNotOptimize(machine.read(i));
    machine.end_operation();
  }
  state.SetItemsProcessed(state.iterations() * 2 * cells);
}
BENCHMARK(BM_machine_probes)->Arg(1024)->Arg(16384);

void BM_dyn_operate(benchmark::State& state) {
  const uint64_t n_ops = static_cast<uint64_t>(state.range(0));
  const unsigned d = 16;
  AnnParams params{d, 2, 2.0};
  for (auto _ : state) {
    LinearScanStatic base(params);
    uint64_t n_max = 2 * n_ops;
    uint64_t cells = ObliviousDynamic::cells_required(n_ops, n_max, base);
    Machine machine(cells, 32, 64, 7);
    ObliviousDynamic dyn(machine, base, d, n_max);
    Rng rng(11);
    for (uint64_t t = 0; t < n_ops; ++t) {
      Point x = random_point(d, rng);
      if (rng.bit())
        dyn.operate_insert(x);
      else
        dyn.operate_query(x);
    }
    benchmark::DoNotOptimize(machine.total_probes());
  }
  state.SetItemsProcessed(state.iterations() * n_ops);
}
BENCHMARK(BM_dyn_operate)->Arg(256)->Arg(1024);

void BM_resolution_probability(benchmark::State& state) {
  SamplingParams params{200, 40, 5};
  for (auto _ : state) benchmark::DoNotOptimize(resolution_probability(params));
}
BENCHMARK(BM_resolution_probability);

}  // namespace

BENCHMARK_MAIN();
