#include <benchmark/benchmark.h>

#include "qicert/bell.hpp"
#include "qicert/kernels.hpp"
#include "qicert/protocol.hpp"
#include "qicert/seesaw.hpp"

namespace {

using namespace qicert;

ComplexMatrix random_square(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = rng.complex_normal();
  return m;
}

template <ComplexMatrix (*Matmul)(const ComplexMatrix&, const ComplexMatrix&)>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexMatrix a = random_square(n, 1), b = random_square(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Matmul(a, b));
}
BENCHMARK(BM_Matmul<kernels::serial::matmul>)->Name("matmul/serial")->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(BM_Matmul<kernels::omp::matmul>)->Name("matmul/omp")->RangeMultiplier(2)->Range(16, 128);

template <ComplexMatrix (*Kron)(const ComplexMatrix&, const ComplexMatrix&)>
void BM_Kron(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexMatrix a = random_square(n, 3), b = random_square(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kron(a, b));
}
BENCHMARK(BM_Kron<kernels::serial::kron>)->Name("kron/serial")->RangeMultiplier(2)->Range(4, 16);
BENCHMARK(BM_Kron<kernels::omp::kron>)->Name("kron/omp")->RangeMultiplier(2)->Range(4, 16);

template <double (*Bound)(const BellExpression&)>
void BM_ClassicalBound(benchmark::State& state) {
  const BellExpression expr = BellExpression::all_zero(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Bound(expr));
}
BENCHMARK(BM_ClassicalBound<classical_bound_serial>)->Name("classical_bound/serial")->DenseRange(4, 8, 2);
BENCHMARK(BM_ClassicalBound<classical_bound>)->Name("classical_bound/omp")->DenseRange(4, 8, 2);

template <CorrelationRecord (*Run)(const Strategy&)>
void BM_Scenario(benchmark::State& state) {
  const auto s = scramble_strategy(reference_strategy(2), {2, 2}, 7).strategy;
  for (auto _ : state) benchmark::DoNotOptimize(Run(s));
}
BENCHMARK(BM_Scenario<run_scenario_serial>)->Name("run_scenario/serial");
BENCHMARK(BM_Scenario<run_scenario>)->Name("run_scenario/omp");

template <SeesawResult (*Maximize)(const BellExpression&, const SeesawConfig&)>
void BM_Seesaw(benchmark::State& state) {
  const SeesawConfig config{.local_dims = {2, 2, 2}, .max_iters = 50, .restarts = 8};
  const BellExpression expr = BellExpression::all_zero(3);
  for (auto _ : state) benchmark::DoNotOptimize(Maximize(expr, config));
}
BENCHMARK(BM_Seesaw<seesaw_maximize_serial>)->Name("seesaw/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Seesaw<seesaw_maximize>)->Name("seesaw/omp")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
