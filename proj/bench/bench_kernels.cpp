// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "mimosim/config.hpp"
#include "mimosim/constellation.hpp"
#include "mimosim/random.hpp"
#include "mimosim/receiver.hpp"
#include "mimosim/simulation.hpp"

using namespace mimosim;

namespace {

std::vector<Complex> noisy_symbols(const ConstellationTable& table, std::size_t n) {
  RandomStream rng(3);
  std::vector<Complex> s(n);
  for (auto& v : s) v = table.point(static_cast<SymbolIndex>(rng.bits() % table.size())) + rng.complex_normal(0.02);
  return s;
}

void BM_DetectMlSerial(benchmark::State& state) {
  const auto table = build_constellation(Scheme::QAM, static_cast<int>(state.range(0)));
  const auto s = noisy_symbols(table, 1 << 16);
  for (auto _ : state) benchmark::DoNotOptimize(detect_ml_serial(s, table));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}

void BM_DetectMlParallel(benchmark::State& state) {
  const auto table = build_constellation(Scheme::QAM, static_cast<int>(state.range(0)));
  const auto s = noisy_symbols(table, 1 << 16);
  for (auto _ : state) benchmark::DoNotOptimize(detect_ml(s, table));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}

void BM_DetectKmeansSerial(benchmark::State& state) {
  const auto table = build_constellation(Scheme::QAM, static_cast<int>(state.range(0)));
  const auto iq = to_iq_points(noisy_symbols(table, 1 << 16));
  for (auto _ : state) benchmark::DoNotOptimize(detect_kmeans_serial(iq, table));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(iq.size()));
}

void BM_DetectKmeansParallel(benchmark::State& state) {
  const auto table = build_constellation(Scheme::QAM, static_cast<int>(state.range(0)));
  const auto iq = to_iq_points(noisy_symbols(table, 1 << 16));
  for (auto _ : state) benchmark::DoNotOptimize(detect_kmeans(iq, table));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(iq.size()));
}

// Default link, 200 blocks per noise point; argument is the thread count (0 = all).
void BM_Sweep(benchmark::State& state) {
  const Simulator sim(config_from_map({{"n_transmissions", "200"}}));
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim.run_sweep(threads));
  state.SetItemsProcessed(state.iterations() * 6 * 200);
}

} // namespace

BENCHMARK(BM_DetectMlSerial)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DetectMlParallel)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_DetectKmeansSerial)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DetectKmeansParallel)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
