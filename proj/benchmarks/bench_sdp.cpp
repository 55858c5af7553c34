#include <benchmark/benchmark.h>

#include <string>

#include "secrelay/feasibility.hpp"
#include "secrelay/mutual_information.hpp"
#include "secrelay/perfect_csi.hpp"
#include "secrelay/robust_csi.hpp"
#include "secrelay/scenario.hpp"

using namespace secrelay;

namespace {

const Scenario& base() {
  static const Scenario sc = load_scenario(std::string(SECRELAY_BENCH_DATA) + "/scenario_sec5.json");
  return sc;
}

const MiEvaluator& evaluator() {
  static const MiEvaluator mi(base().alphabet);
  return mi;
}

// One feasibility solve at a mid level; arg is J.
void BM_PerfectFeasibility(benchmark::State& state) {
  const Scenario s = base().with_eavesdroppers(static_cast<int>(state.range(0)));
  const PerfectInstance inst = PerfectInstance::make(s.channels, s.power, evaluator(), 0.081, true);
  const LmiProblem problem = build_feasibility(inst, 0.5 * (inst.bounds.a + inst.bounds.c));
  for (auto _ : state) benchmark::DoNotOptimize(solve_feasibility(problem));
}
BENCHMARK(BM_PerfectFeasibility)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

// Full bisection plus rank-one refinement; args are (J, AN on).
void BM_PerfectRate(benchmark::State& state) {
  const Scenario s = base().with_eavesdroppers(static_cast<int>(state.range(0)));
  const PerfectInstance inst = PerfectInstance::make(s.channels, s.power, evaluator(), 0.081, state.range(1) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_rate(inst, evaluator(), s.solver));
}
BENCHMARK(BM_PerfectRate)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

// Robust bisection at eps = 0.02 on every ball; arg is J.
void BM_RobustRate(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const Scenario s = base().with_eavesdroppers(J);
  const UncertaintyRadii radii = UncertaintyRadii::uniform(0.02, J);
  const RobustInstance inst = RobustInstance::make(s.channels, radii, s.power, evaluator(), 0.081, true);
  for (auto _ : state) benchmark::DoNotOptimize(solve_robust_rate(inst, evaluator(), s.solver));
}
BENCHMARK(BM_RobustRate)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
