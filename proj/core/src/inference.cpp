#include "phmm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phmm/errors.hpp"

namespace phmm {

namespace {

// Row-major T x K table.
struct Lattice {
  std::size_t steps;
  std::size_t k;
  std::vector<double> v;

  Lattice(std::size_t steps_, std::size_t k_) : steps(steps_), k(k_), v(steps_ * k_) {}
  double* row(std::size_t t) { return v.data() + t * k; }
  const double* row(std::size_t t) const { return v.data() + t * k; }
};

Lattice log_emissions(const ObservationSeries& series, const PoissonHmm& model) {
  const std::size_t k = static_cast<std::size_t>(model.num_states());
  std::vector<double> log_rate(k);
  for (std::size_t j = 0; j < k; ++j) log_rate[j] = std::log(model.rates()[j]);

  Lattice e(series.size(), k);
  for (std::size_t t = 0; t < series.size(); ++t) {
    const double x = static_cast<double>(series[t]);
    const double log_fact = std::lgamma(x + 1.0);
    double* out = e.row(t);
    for (std::size_t j = 0; j < k; ++j) out[j] = x * log_rate[j] - model.rates()[j] - log_fact;
  }
  return e;
}

double log_sum_exp(const double* v, std::size_t n) {
  const double m = *std::max_element(v, v + n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

// out[j] = log sum_i A(i, j) exp(in[i]) for the sticky kernel, which is
// symmetric, so the same step serves forward and backward passes. With
// w = exp(in - max), sum_i A(i, j) w_i = off * (S - w_j) + diag * w_j; the
// argmax term keeps the bracket >= min(off, diag) > 0.
void sticky_log_propagate(const double* in, double* out, std::size_t k, double diag, double off,
                          std::vector<double>& scratch) {
  const double m = *std::max_element(in, in + k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    scratch[i] = std::exp(in[i] - m);
    total += scratch[i];
  }
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = m + std::log(off * (total - scratch[j]) + diag * scratch[j]);
  }
}

Lattice forward(const Lattice& e, const PoissonHmm& model) {
  const std::size_t k = e.k;
  const double diag = model.diagonal_prob();
  const double off = model.switch_prob();
  const double log_init = -std::log(static_cast<double>(k));

  Lattice alpha(e.steps, k);
  std::vector<double> scratch(k);
  for (std::size_t j = 0; j < k; ++j) alpha.row(0)[j] = log_init + e.row(0)[j];
  for (std::size_t t = 1; t < e.steps; ++t) {
    double* a = alpha.row(t);
    sticky_log_propagate(alpha.row(t - 1), a, k, diag, off, scratch);
    for (std::size_t j = 0; j < k; ++j) a[j] += e.row(t)[j];
  }
  return alpha;
}

Lattice backward(const Lattice& e, const PoissonHmm& model) {
  const std::size_t k = e.k;
  const double diag = model.diagonal_prob();
  const double off = model.switch_prob();

  Lattice beta(e.steps, k);  // last row stays 0
  std::vector<double> next(k);
  std::vector<double> scratch(k);
  for (std::size_t t = e.steps - 1; t-- > 0;) {
    for (std::size_t j = 0; j < k; ++j) next[j] = e.row(t + 1)[j] + beta.row(t + 1)[j];
    sticky_log_propagate(next.data(), beta.row(t), k, diag, off, scratch);
  }
  return beta;
}

}  // namespace

PosteriorMarginals::PosteriorMarginals(std::size_t num_steps, int num_states,
                                       std::vector<double> gamma)
    : steps_(num_steps), k_(num_states), gamma_(std::move(gamma)) {
  if (k_ < 1 || gamma_.size() != steps_ * static_cast<std::size_t>(k_)) {
    throw DomainError("posterior marginals shape mismatch");
  }
}

double PosteriorMarginals::at(std::size_t t, int state) const {
  if (t >= steps_ || state < 1 || state > k_) throw DomainError("posterior index out of range");
  return gamma_[t * static_cast<std::size_t>(k_) + static_cast<std::size_t>(state - 1)];
}

double log_marginal_likelihood(const ObservationSeries& series, const PoissonHmm& model) {
  const Lattice alpha = forward(log_emissions(series, model), model);
  return log_sum_exp(alpha.row(alpha.steps - 1), alpha.k);
}

ForwardBackwardResult forward_backward(const ObservationSeries& series, const PoissonHmm& model) {
  const Lattice e = log_emissions(series, model);
  const Lattice alpha = forward(e, model);
  const Lattice beta = backward(e, model);
  const std::size_t k = e.k;

  // Normalize after shifting by the row max rather than subtracting a full
  // log normalizer: at |log p| ~ 1e7 the rounding of m + log(s) alone is ~1e-9.
  std::vector<double> gamma(e.steps * k);
  std::vector<double> joint(k);
  for (std::size_t t = 0; t < e.steps; ++t) {
    for (std::size_t j = 0; j < k; ++j) joint[j] = alpha.row(t)[j] + beta.row(t)[j];
    const double m = *std::max_element(joint.begin(), joint.end());
    double* g = gamma.data() + t * k;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      g[j] = std::exp(joint[j] - m);
      total += g[j];
    }
    for (std::size_t j = 0; j < k; ++j) g[j] /= total;
  }
  const double ll = log_sum_exp(alpha.row(e.steps - 1), k);
  return {ll, PosteriorMarginals(e.steps, static_cast<int>(k), std::move(gamma))};
}

PosteriorMarginals posterior_marginals(const ObservationSeries& series, const PoissonHmm& model) {
  return forward_backward(series, model).marginals;
}

StateSequence map_states(const PosteriorMarginals& marginals) {
  std::vector<int> states(marginals.num_steps());
  for (std::size_t t = 0; t < states.size(); ++t) {
    const auto row = marginals.row(t);
    // max_element returns the first maximum, i.e. the lowest state.
    states[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()) + 1;
  }
  return StateSequence(std::move(states));
}

std::vector<double> rate_path(const StateSequence& states, const PoissonHmm& model) {
  std::vector<double> rates;
  rates.reserve(states.size());
  for (int s : states.states()) rates.push_back(model.rate(s));
  return rates;
}

StateSequence viterbi(const ObservationSeries& series, const PoissonHmm& model) {
  const Lattice e = log_emissions(series, model);
  const std::size_t k = e.k;
  const std::size_t steps = e.steps;
  const double log_diag = std::log(model.diagonal_prob());
  const double log_off =
      k > 1 ? std::log(model.switch_prob()) : -std::numeric_limits<double>::infinity();
  const double log_init = -std::log(static_cast<double>(k));

  Lattice delta(steps, k);
  std::vector<std::size_t> back(steps * k, 0);
  for (std::size_t j = 0; j < k; ++j) delta.row(0)[j] = log_init + e.row(0)[j];
  for (std::size_t t = 1; t < steps; ++t) {
    const double* prev = delta.row(t - 1);
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t best = 0;
      double best_score = prev[0] + (j == 0 ? log_diag : log_off);
      for (std::size_t i = 1; i < k; ++i) {
        const double score = prev[i] + (i == j ? log_diag : log_off);
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      delta.row(t)[j] = best_score + e.row(t)[j];
      back[t * k + j] = best;
    }
  }

  const double* last = delta.row(steps - 1);
  std::size_t z = static_cast<std::size_t>(std::max_element(last, last + k) - last);
  std::vector<int> states(steps);
  for (std::size_t t = steps; t-- > 0;) {
    states[t] = static_cast<int>(z) + 1;
    if (t > 0) z = back[t * k + z];
  }
  return StateSequence(std::move(states));
}

}  // namespace phmm
