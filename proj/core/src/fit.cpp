#include "phmm/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "phmm/errors.hpp"
#include "phmm/inference.hpp"

namespace phmm {

namespace {

// Linear interpolation between order statistics (the "type 7" quantile).
double quantile(std::span<const double> sorted, double prob) {
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool improvement_below(double previous, double current, double rel_tol) {
  const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
  return (current - previous) / scale < rel_tol;
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own slot, so the outcome does not depend on scheduling.
template <typename Body>
void parallel_for(int n, int threads, Body&& body) {
  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next++; i < n; i = next++) body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void FitConfig::validate() const {
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
  if (!(rate_tol > 0.0)) throw DomainError("rate_tol must be > 0");
  if (restarts < 1) throw DomainError("restarts must be >= 1");
  if (threads < 1) throw DomainError("threads must be >= 1");
  if (!(stay_prob > 0.0 && stay_prob < 1.0)) throw DomainError("stay_prob must lie in (0, 1)");
}

std::vector<double> initial_rates(const ObservationSeries& series, int num_states, int restart,
                                  std::uint64_t seed) {
  if (num_states < 1) throw DomainError("number of states must be >= 1");
  if (restart < 0) throw DomainError("restart index must be >= 0");

  std::vector<double> sorted(series.counts().begin(), series.counts().end());
  std::sort(sorted.begin(), sorted.end());

  const auto k = static_cast<std::size_t>(num_states);
  std::vector<double> rates(k);
  for (std::size_t j = 0; j < k; ++j) {
    rates[j] = quantile(sorted, (static_cast<double>(j) + 0.5) / static_cast<double>(k));
  }
  if (restart > 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(num_states), static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (double& r : rates) r *= std::exp(jitter(rng));
  }
  for (double& r : rates) r = std::max(r, kRateFloor);
  return rates;
}

std::vector<double> m_step(const ObservationSeries& series, const PosteriorMarginals& marginals,
                           std::span<const double> previous_rates, int* starved) {
  const auto k = static_cast<std::size_t>(marginals.num_states());
  if (previous_rates.size() != k || marginals.num_steps() != series.size()) {
    throw DomainError("M-step inputs disagree in shape");
  }
  std::vector<double> mass(k, 0.0);
  std::vector<double> weighted(k, 0.0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    const auto g = marginals.row(t);
    const double x = static_cast<double>(series[t]);
    for (std::size_t j = 0; j < k; ++j) {
      mass[j] += g[j];
      weighted[j] += g[j] * x;
    }
  }
  std::vector<double> rates(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (mass[j] == 0.0) {
      rates[j] = previous_rates[j];
      if (starved) ++*starved;
    } else {
      rates[j] = std::max(weighted[j] / mass[j], kRateFloor);
    }
  }
  return rates;
}

EmRun run_em(const ObservationSeries& series, std::vector<double> init_rates,
             const FitConfig& config) {
  config.validate();
  for (double& r : init_rates) r = std::max(r, kRateFloor);

  EmRun run{PoissonHmm(std::move(init_rates), config.stay_prob), {}, false, 0, 0.0, 0};
  while (true) {
    auto fb = forward_backward(series, run.model);
    run.ll_trace.push_back(fb.log_likelihood);
    const std::size_t n = run.ll_trace.size();
    if (n >= 2 && run.last_rate_change < config.rate_tol &&
        improvement_below(run.ll_trace[n - 2], run.ll_trace[n - 1], config.rel_tol)) {
      run.converged = true;
      break;
    }
    if (run.iterations >= config.max_iters) break;
    auto next = m_step(series, fb.marginals, run.model.rates(), &run.starved_updates);
    run.last_rate_change = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      run.last_rate_change = std::max(
          run.last_rate_change, std::abs(next[j] - run.model.rates()[j]) / next[j]);
    }
    run.model = PoissonHmm(std::move(next), config.stay_prob);
    ++run.iterations;
  }

  std::vector<double> sorted(run.model.rates().begin(), run.model.rates().end());
  std::sort(sorted.begin(), sorted.end());
  run.model = PoissonHmm(std::move(sorted), config.stay_prob);
  return run;
}

FitResult em_fit(const ObservationSeries& series, int num_states, const FitConfig& config) {
  config.validate();
  if (num_states < 1) throw DomainError("number of states must be >= 1");

  std::vector<std::optional<EmRun>> slots(static_cast<std::size_t>(config.restarts));
  parallel_for(config.restarts, config.threads, [&](int r) {
    slots[static_cast<std::size_t>(r)] =
        run_em(series, initial_rates(series, num_states, r, config.seed), config);
  });

  std::vector<EmRun> runs;
  runs.reserve(slots.size());
  for (auto& s : slots) runs.push_back(std::move(*s));

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].final_log_likelihood() >
        runs[best].final_log_likelihood() + kSelectionTieTolerance) {
      best = r;
    }
  }
  const EmRun& b = runs[best];
  return FitResult{b.model,      b.final_log_likelihood(), b.ll_trace, b.converged,
                   b.iterations, static_cast<int>(best),   std::move(runs)};
}

ModelSelectionReport select_num_states(const ObservationSeries& series, int max_states,
                                       const FitConfig& config) {
  if (max_states < 1 || max_states > 64) throw DomainError("max_states must lie in [1, 64]");
  config.validate();

  ModelSelectionReport report{{}, 1};
  report.candidates.reserve(static_cast<std::size_t>(max_states));
  for (int k = 1; k <= max_states; ++k) {
    FitResult fit = em_fit(series, k, config);
    const double score = fit.final_log_likelihood;
    report.candidates.push_back(ModelCandidate{k, score, std::move(fit)});
  }

  double best = report.candidates.front().approx_log_marginal;
  for (const auto& c : report.candidates) best = std::max(best, c.approx_log_marginal);
  for (const auto& c : report.candidates) {
    if (c.approx_log_marginal >= best - kSelectionTieTolerance) {
      report.selected_num_states = c.num_states;
      break;
    }
  }
  return report;
}

}  // namespace phmm
