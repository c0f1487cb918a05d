#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phmm/inference.hpp"
#include "phmm/model.hpp"

namespace phmm {

struct FitConfig {
  int max_iters = 500;
  /// EM has converged once (ll_new - ll_old) / |ll_old| < rel_tol and the
  /// last M-step moved no rate by more than rate_tol relative. The second
  /// test matters on flat ridges (near-duplicate states), where the
  /// likelihood stalls long before the rates do.
  double rel_tol = 1e-8;
  double rate_tol = 1e-7;
  int restarts = 20;
  std::uint64_t seed = 0;
  double stay_prob = kDefaultStayProb;
  /// Worker threads for independent restarts. Results do not depend on it.
  int threads = 1;

  /// Throws DomainError on max_iters < 1, rel_tol <= 0, rate_tol <= 0, restarts < 1,
  /// threads < 1 or a stay probability outside (0, 1).
  void validate() const;
};

/// One EM run from a fixed initialization.
struct EmRun {
  PoissonHmm model;  // rates sorted ascending
  /// Log-likelihood of the rates entering each E-step; back() belongs to `model`.
  std::vector<double> ll_trace;
  bool converged = false;
  int iterations = 0;  // M-steps applied
  /// Largest relative rate change made by the last M-step.
  double last_rate_change = 0.0;
  /// M-step updates skipped because a state's responsibility mass was zero.
  int starved_updates = 0;

  double final_log_likelihood() const { return ll_trace.back(); }
};

struct FitResult {
  PoissonHmm model;  // rates sorted ascending
  double final_log_likelihood;
  std::vector<double> ll_trace;
  bool converged;
  int iterations;
  int best_restart;
  /// Every restart in restart order, for provenance.
  std::vector<EmRun> runs;
};

struct ModelCandidate {
  int num_states;
  double approx_log_marginal;
  FitResult fit;
};

struct ModelSelectionReport {
  std::vector<ModelCandidate> candidates;  // ordered by num_states, 1..K_max
  int selected_num_states;

  const ModelCandidate& selected() const {
    return candidates[static_cast<std::size_t>(selected_num_states - 1)];
  }
};

/// Log-likelihood ties closer than this go to the smaller model / earlier restart.
inline constexpr double kSelectionTieTolerance = 1e-9;

/// Quantile-based start for restart 0 and log-normally jittered starts for
/// restart >= 1, clamped to kRateFloor.
std::vector<double> initial_rates(const ObservationSeries& series, int num_states, int restart,
                                  std::uint64_t seed);

/// Baum-Welch for the rates only; stay_prob is held at config.stay_prob.
EmRun run_em(const ObservationSeries& series, std::vector<double> init_rates,
             const FitConfig& config);

/// Poisson M-step: sum_t gamma_t(k) x_t / sum_t gamma_t(k), floored at
/// kRateFloor. A state with zero responsibility mass keeps previous_rates[k].
std::vector<double> m_step(const ObservationSeries& series, const PosteriorMarginals& marginals,
                           std::span<const double> previous_rates, int* starved = nullptr);

/// Best of config.restarts EM runs for a fixed number of states.
FitResult em_fit(const ObservationSeries& series, int num_states, const FitConfig& config);

/// em_fit for K = 1..max_states, selecting the K with the largest
/// maximized log-likelihood.
ModelSelectionReport select_num_states(const ObservationSeries& series, int max_states,
                                       const FitConfig& config);

}  // namespace phmm
