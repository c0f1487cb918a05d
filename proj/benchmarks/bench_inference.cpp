#include <benchmark/benchmark.h>

#include "phmm/inference.hpp"
#include "phmm/simulate.hpp"

namespace {

phmm::PoissonHmm ladder(int k) {
  std::vector<double> rates;
  for (int j = 1; j <= k; ++j) rates.push_back(3.0 * j * j);
  return phmm::PoissonHmm(rates, 0.95);
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto model = ladder(static_cast<int>(state.range(1)));
  const auto sim = phmm::simulate(model, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(phmm::forward_backward(sim.series, model));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->ArgsProduct({{365, 3650}, {2, 4, 8, 16}});

void BM_LogMarginalLikelihood(benchmark::State& state) {
  const auto model = ladder(static_cast<int>(state.range(1)));
  const auto sim = phmm::simulate(model, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(phmm::log_marginal_likelihood(sim.series, model));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogMarginalLikelihood)->ArgsProduct({{365, 3650}, {2, 8}});

void BM_Viterbi(benchmark::State& state) {
  const auto model = ladder(static_cast<int>(state.range(0)));
  const auto sim = phmm::simulate(model, 365, 1);
  for (auto _ : state) benchmark::DoNotOptimize(phmm::viterbi(sim.series, model));
}
BENCHMARK(BM_Viterbi)->Arg(2)->Arg(8)->Arg(16);

}  // namespace
