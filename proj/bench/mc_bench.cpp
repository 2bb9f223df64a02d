// Serial reference loop vs the batched OpenMP kernel on the same trials.

#include <benchmark/benchmark.h>

#include "xduplex/analytic.hpp"
#include "xduplex/mc.hpp"

namespace {

using namespace xduplex;

const mc::Request& all_schemes() {
  static const mc::Request req{{kAllSchemes.begin(), kAllSchemes.end()}, {analytic::outage_threshold(2.0)},
                               Modulation::bpsk()};
  return req;
}

void BM_Serial(benchmark::State& state) {
  const auto params = SystemParams::symmetric(1000.0, 0.01);
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::simulate_serial(params, all_schemes(), trials, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const auto params = SystemParams::symmetric(1000.0, 0.01);
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  mc::Options opt;
  opt.workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::simulate(params, all_schemes(), trials, 7, opt));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)
    ->Args({1 << 18, 1})
    ->Args({1 << 18, 2})
    ->Args({1 << 18, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
