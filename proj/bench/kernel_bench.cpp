// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "gibbsbp/bench.hpp"
#include "gibbsbp/densemat.hpp"
#include "gibbsbp/trotter.hpp"

using namespace gibbsbp;

namespace {

ComplexMatrix random_matrix(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix m(dim);
  for (auto& x : m.entries()) x = {g(rng), g(rng)};
  return m;
}

template <bool Parallel>
void BM_Multiply(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const ComplexMatrix a = random_matrix(dim, 1), b = random_matrix(dim, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? multiply(a, b) : serial::multiply(a, b));
  }
}
BENCHMARK(BM_Multiply<false>)->Name("multiply/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Multiply<true>)->Name("multiply/parallel")->RangeMultiplier(2)->Range(32, 256);

template <bool Parallel>
void BM_StContract(benchmark::State& state) {
  const TrotterPlan plan(heisenberg_chain(static_cast<std::size_t>(state.range(0)), 1.0), 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? st_contract(plan) : serial::st_contract(plan));
  }
}
BENCHMARK(BM_StContract<false>)->Name("st_contract/serial")->DenseRange(3, 7, 2);
BENCHMARK(BM_StContract<true>)->Name("st_contract/parallel")->DenseRange(3, 7, 2);

template <bool Parallel>
void BM_Sweep(benchmark::State& state) {
  bench::SweepConfig c;
  c.sites = static_cast<std::size_t>(state.range(0));
  c.timing_repetitions = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? bench::run_sweep(c) : bench::serial::run_sweep(c));
  }
}
BENCHMARK(BM_Sweep<false>)->Name("sweep/serial")->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<true>)->Name("sweep/parallel")->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
