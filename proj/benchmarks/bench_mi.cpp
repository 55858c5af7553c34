#include <benchmark/benchmark.h>

#include "secrelay/alphabet.hpp"
#include "secrelay/mutual_information.hpp"

using namespace secrelay;

namespace {

Alphabet alphabet_for(int index) {
  switch (index) {
    case 0: return Alphabet::bpsk();
    case 1: return Alphabet::psk(4);
    default: return Alphabet::qam16();
  }
}

// Uncached quadrature cost per evaluation; args are (alphabet, order).
void BM_Quadrature(benchmark::State& state) {
  MiEvaluator mi(alphabet_for(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  mi.set_cache_enabled(false);
  double rho = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi.mutual_information(rho));
    rho = rho < 20.0 ? rho * 1.07 : 0.5;
  }
  state.SetLabel(mi.alphabet().name());
}
BENCHMARK(BM_Quadrature)->ArgsProduct({{0, 1, 2}, {32, 48, 96}})->Unit(benchmark::kMicrosecond);

void BM_CachedLookup(benchmark::State& state) {
  const MiEvaluator mi(Alphabet::bpsk());
  benchmark::DoNotOptimize(mi.mutual_information(2.5));
  for (auto _ : state) benchmark::DoNotOptimize(mi.mutual_information(2.5));
}
BENCHMARK(BM_CachedLookup);

void BM_Inverse(benchmark::State& state) {
  MiEvaluator mi(Alphabet::bpsk());
  mi.set_cache_enabled(false);
  for (auto _ : state) benchmark::DoNotOptimize(mi.inverse(0.162));
}
BENCHMARK(BM_Inverse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
