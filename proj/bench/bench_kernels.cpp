// Serial reference vs OpenMP variant of each kernel, same inputs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>

#include "dht/causal.hpp"
#include "dht/kernels.hpp"

using namespace dht;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::Serial : Exec::Parallel; }

std::vector<double> smooth(std::size_t n) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    f[i] = 0.6 * std::exp(-(x - 0.5) * (x - 0.5) / 0.05) + 0.05;
  }
  return f;
}

void BM_DistanceMatrix(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<EventRecord> events;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    std::vector<double> x(8);
    for (auto& v : x) v = static_cast<double>(rng() >> 11) * 0x1p-53;
    events.push_back({static_cast<std::size_t>(i), std::move(x)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::distance_matrix(events, Metric::Euclidean, exec_of(state)));
}

void BM_Gradient(benchmark::State& state) {
  const auto f = smooth(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::gradient(f, 1e-3, exec_of(state)));
}

void BM_SecondDerivative(benchmark::State& state) {
  const auto f = smooth(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::second_derivative(f, 1e-3, exec_of(state)));
}

void BM_QuantumPotential(benchmark::State& state) {
  const auto f = smooth(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::quantum_potential(f, 1e-3, exec_of(state)));
}

void BM_MeanSquareDifference(benchmark::State& state) {
  const auto f = smooth(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mean_square_difference(f, exec_of(state)));
}

void BM_Ultrametric(benchmark::State& state) {
  std::vector<EdgeCode> codes;
  for (std::int64_t depth = 1; depth <= state.range(0); ++depth) {
    for (const auto& c : all_codes(static_cast<std::size_t>(depth))) codes.push_back(c);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::check_ultrametric(codes, exec_of(state)));
}

void BM_ClassifyEnsemble(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<Dendrogram> ds;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    std::vector<EventRecord> ev;
    for (std::size_t k = 0; k < 3 + rng() % 10; ++k) ev.push_back({k, {static_cast<double>(rng() % 1000)}});
    ds.push_back(agglomerate(ev, {Metric::Euclidean, Linkage::Average, TieBreak::SmallestMemberIndex}));
  }
  for (auto _ : state) benchmark::DoNotOptimize(classify_ensemble(ds, exec_of(state)));
}

}  // namespace

// Second argument: 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_DistanceMatrix)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SecondDerivative)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_QuantumPotential)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MeanSquareDifference)->ArgsProduct({{1024, 4096}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Ultrametric)->ArgsProduct({{5, 6}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassifyEnsemble)->ArgsProduct({{32, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::AddCustomContext("omp_threads", std::to_string(kernels::max_threads()));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
