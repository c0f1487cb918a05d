#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phmm/model.hpp"

namespace phmm {

/// T x K matrix of posterior state probabilities p(Z_t = k | x_1..x_T).
class PosteriorMarginals {
 public:
  PosteriorMarginals(std::size_t num_steps, int num_states, std::vector<double> gamma);

  std::size_t num_steps() const noexcept { return steps_; }
  int num_states() const noexcept { return k_; }

  /// Probability of `state` (1-based) at step t (0-based day offset).
  double at(std::size_t t, int state) const;
  /// Row t; element j is the probability of state j + 1.
  std::span<const double> row(std::size_t t) const noexcept {
    return {gamma_.data() + t * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
  }

 private:
  std::size_t steps_;
  int k_;
  std::vector<double> gamma_;
};

struct ForwardBackwardResult {
  double log_likelihood;
  PosteriorMarginals marginals;
};

/// log sum over all paths of p(x, z | model), via the forward recursion in
/// log space.
double log_marginal_likelihood(const ObservationSeries& series, const PoissonHmm& model);

PosteriorMarginals posterior_marginals(const ObservationSeries& series, const PoissonHmm& model);

/// Both of the above from one forward and one backward sweep.
ForwardBackwardResult forward_backward(const ObservationSeries& series, const PoissonHmm& model);

/// Per-step argmax of the marginals (not the joint MAP path). Ties go to
/// the lowest state.
StateSequence map_states(const PosteriorMarginals& marginals);

/// Rate of the decoded state at each step. Throws DomainError when a state
/// is outside [1, K].
std::vector<double> rate_path(const StateSequence& states, const PoissonHmm& model);

/// Joint MAP path by max-product. Ties go to the lowest state both at the
/// final step and at every backtrack step.
StateSequence viterbi(const ObservationSeries& series, const PoissonHmm& model);

}  // namespace phmm
