#include "phmm/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "phmm/errors.hpp"

namespace phmm {

namespace {

void check_stay_prob(int num_states, double stay_prob) {
  if (num_states >= 2 && !(stay_prob > 0.0 && stay_prob < 1.0)) {
    throw DomainError("stay probability must lie in (0, 1) when K >= 2, got " +
                      std::to_string(stay_prob));
  }
}

}  // namespace

ObservationSeries::ObservationSeries(Date start_date, std::vector<Count> counts)
    : start_(start_date), counts_(std::move(counts)) {
  if (counts_.empty()) throw DomainError("observation series must contain at least one day");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 0) {
      throw DomainError("negative count " + std::to_string(counts_[i]) + " at day " +
                        std::to_string(i));
    }
  }
}

Count ObservationSeries::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), Count{0});
}

double ObservationSeries::mean() const noexcept {
  double sum = 0.0;
  for (Count c : counts_) sum += static_cast<double>(c);
  return sum / static_cast<double>(counts_.size());
}

PoissonHmm::PoissonHmm(std::vector<double> rates, double stay_prob)
    : rates_(std::move(rates)), stay_prob_(stay_prob) {
  if (rates_.empty()) throw DomainError("a Poisson HMM needs at least one state");
  for (double r : rates_) {
    if (!std::isfinite(r) || r < kRateFloor) {
      throw DomainError("rate " + std::to_string(r) + " is below the rate floor or not finite");
    }
  }
  check_stay_prob(num_states(), stay_prob_);
}

double PoissonHmm::rate(int state) const {
  if (state < 1 || state > num_states()) {
    throw DomainError("state " + std::to_string(state) + " outside [1, " +
                      std::to_string(num_states()) + "]");
  }
  return rates_[static_cast<std::size_t>(state - 1)];
}

double PoissonHmm::switch_prob() const noexcept {
  return num_states() == 1 ? 0.0 : (1.0 - stay_prob_) / (num_states() - 1);
}

double PoissonHmm::diagonal_prob() const noexcept {
  return num_states() == 1 ? 1.0 : stay_prob_;
}

StateSequence::StateSequence(std::vector<int> states) : states_(std::move(states)) {
  for (int s : states_) {
    if (s < 1) throw DomainError("state labels are 1-based, got " + std::to_string(s));
  }
}

TransitionMatrix::TransitionMatrix(int num_states, std::vector<double> entries)
    : k_(num_states), entries_(std::move(entries)) {
  if (k_ < 1 || entries_.size() != static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_)) {
    throw DomainError("transition matrix shape mismatch");
  }
}

double TransitionMatrix::operator()(int from, int to) const {
  if (from < 1 || from > k_ || to < 1 || to > k_) {
    throw DomainError("transition index outside [1, " + std::to_string(k_) + "]");
  }
  return entries_[static_cast<std::size_t>(from - 1) * static_cast<std::size_t>(k_) +
                  static_cast<std::size_t>(to - 1)];
}

// Neumaier-compensated, so K = 64 rows stay within a few ulps of 1.
double TransitionMatrix::row_sum(int from) const {
  double sum = 0.0;
  double carry = 0.0;
  for (int to = 1; to <= k_; ++to) {
    const double v = (*this)(from, to);
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

double poisson_log_pmf(Count x, double rate) {
  if (x < 0) throw DomainError("Poisson count must be non-negative");
  if (!(rate >= kRateFloor) || !std::isfinite(rate)) {
    throw DomainError("Poisson rate must be finite and >= the rate floor");
  }
  const double xd = static_cast<double>(x);
  // 0 * log(rate) is 0 for every admissible rate, so no special case for x == 0.
  return xd * std::log(rate) - rate - std::lgamma(xd + 1.0);
}

TransitionMatrix transition_matrix(int num_states, double stay_prob) {
  if (num_states < 1) throw DomainError("transition matrix needs K >= 1");
  check_stay_prob(num_states, stay_prob);
  const auto k = static_cast<std::size_t>(num_states);
  if (k == 1) return TransitionMatrix(1, {1.0});

  const double off = (1.0 - stay_prob) / static_cast<double>(k - 1);
  std::vector<double> entries(k * k, off);
  for (std::size_t i = 0; i < k; ++i) entries[i * k + i] = stay_prob;
  return TransitionMatrix(num_states, std::move(entries));
}

}  // namespace phmm
