#include <benchmark/benchmark.h>

#include "phmm/fit.hpp"
#include "phmm/simulate.hpp"

namespace {

const phmm::ObservationSeries& three_state_year() {
  static const auto sim = phmm::simulate(phmm::PoissonHmm({5.0, 30.0, 120.0}, 0.96), 730, 1);
  return sim.series;
}

void BM_EmFit(benchmark::State& state) {
  phmm::FitConfig cfg;
  cfg.restarts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phmm::em_fit(three_state_year(), static_cast<int>(state.range(0)), cfg));
  }
}
BENCHMARK(BM_EmFit)->Arg(1)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SelectNumStates(benchmark::State& state) {
  phmm::FitConfig cfg;
  cfg.restarts = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        phmm::select_num_states(three_state_year(), static_cast<int>(state.range(0)), cfg));
  }
}
BENCHMARK(BM_SelectNumStates)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
