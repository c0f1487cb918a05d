#include "phmm/simulate.hpp"

#include <random>
#include <vector>

#include "phmm/errors.hpp"

namespace phmm {

Simulation simulate(const PoissonHmm& model, std::size_t days, std::uint64_t seed, Date start) {
  if (days < 1) throw DomainError("simulation length must be at least one day");

  const int k = model.num_states();
  std::mt19937_64 rng(seed);

  std::vector<std::poisson_distribution<Count>> emit;
  emit.reserve(static_cast<std::size_t>(k));
  for (double r : model.rates()) emit.emplace_back(r);

  std::uniform_int_distribution<int> any_state(1, k);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // For K >= 2 a move picks one of the K - 1 other states uniformly.
  std::uniform_int_distribution<int> other_state(1, k > 1 ? k - 1 : 1);

  std::vector<int> states(days);
  std::vector<Count> counts(days);
  int z = any_state(rng);
  for (std::size_t t = 0; t < days; ++t) {
    if (t > 0 && k > 1 && unit(rng) >= model.stay_prob()) {
      const int j = other_state(rng);
      z = j < z ? j : j + 1;
    }
    states[t] = z;
    counts[t] = emit[static_cast<std::size_t>(z - 1)](rng);
  }
  return Simulation{StateSequence(std::move(states)), ObservationSeries(start, std::move(counts))};
}

}  // namespace phmm
