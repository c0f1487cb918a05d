#pragma once

#include <cstddef>
#include <cstdint>

#include "phmm/model.hpp"

namespace phmm {

struct Simulation {
  StateSequence states;
  ObservationSeries series;
};

inline constexpr Date kDefaultSimulationStart =
    std::chrono::sys_days{std::chrono::year{2022} / std::chrono::October / 1};

/// Draws z_1 uniformly, then z_t from the sticky kernel row of z_{t-1}, and
/// x_t ~ Poisson(rate of z_t). Output is a pure function of (model, days,
/// seed, start).
Simulation simulate(const PoissonHmm& model, std::size_t days, std::uint64_t seed,
                    Date start = kDefaultSimulationStart);

}  // namespace phmm
