#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace phmm {

/// Lower bound applied to every Poisson rate. Keeps log-pmf finite when a
/// regime sees only zero counts.
inline constexpr double kRateFloor = 1e-10;

inline constexpr double kDefaultStayProb = 0.95;

using Count = std::int64_t;
using Date = std::chrono::sys_days;

/// Contiguous daily counts x_1..x_T. Day i (0-based) is start_date() + i.
class ObservationSeries {
 public:
  /// Throws DomainError if `counts` is empty or contains a negative value.
  ObservationSeries(Date start_date, std::vector<Count> counts);

  Date start_date() const noexcept { return start_; }
  Date end_date() const noexcept { return start_ + std::chrono::days(size() - 1); }
  Date date_at(std::size_t i) const noexcept { return start_ + std::chrono::days(i); }

  std::span<const Count> counts() const noexcept { return counts_; }
  Count operator[](std::size_t i) const noexcept { return counts_[i]; }
  std::size_t size() const noexcept { return counts_.size(); }

  Count total() const noexcept;
  double mean() const noexcept;

  friend bool operator==(const ObservationSeries&, const ObservationSeries&) = default;

 private:
  Date start_;
  std::vector<Count> counts_;
};

/// Switching-Poisson HMM with a sticky uniform transition kernel and a
/// uniform initial distribution. The number of states is rates().size().
///
/// States are numbered 1..K in every accessor that takes a state.
class PoissonHmm {
 public:
  /// Throws DomainError if `rates` is empty, a rate is below kRateFloor
  /// (or not finite), or K >= 2 and stay_prob is outside (0, 1).
  explicit PoissonHmm(std::vector<double> rates, double stay_prob = kDefaultStayProb);

  int num_states() const noexcept { return static_cast<int>(rates_.size()); }
  std::span<const double> rates() const noexcept { return rates_; }
  double rate(int state) const;  // 1-based
  double stay_prob() const noexcept { return stay_prob_; }

  /// Probability of moving from one state to a specific different state.
  double switch_prob() const noexcept;
  /// Diagonal of the transition matrix: stay_prob for K >= 2, 1 for K = 1.
  double diagonal_prob() const noexcept;

  friend bool operator==(const PoissonHmm&, const PoissonHmm&) = default;

 private:
  std::vector<double> rates_;
  double stay_prob_;
};

/// Decoded latent path z_1..z_T, values 1-based.
class StateSequence {
 public:
  StateSequence() = default;
  /// Throws DomainError if any state is < 1.
  explicit StateSequence(std::vector<int> states);

  std::span<const int> states() const noexcept { return states_; }
  int operator[](std::size_t t) const noexcept { return states_[t]; }
  std::size_t size() const noexcept { return states_.size(); }

  friend bool operator==(const StateSequence&, const StateSequence&) = default;

 private:
  std::vector<int> states_;
};

/// Row-stochastic K x K matrix, indexed (from, to) with 1-based states.
class TransitionMatrix {
 public:
  TransitionMatrix(int num_states, std::vector<double> entries);

  int num_states() const noexcept { return k_; }
  double operator()(int from, int to) const;
  double row_sum(int from) const;

 private:
  int k_;
  std::vector<double> entries_;
};

/// x*ln(rate) - rate - ln(x!), with ln(x!) from lgamma.
/// Throws DomainError if x < 0 or rate < kRateFloor.
double poisson_log_pmf(Count x, double rate);

/// Sticky kernel: `stay_prob` on the diagonal, (1 - stay_prob)/(K - 1)
/// elsewhere. K = 1 yields [[1]] and ignores stay_prob.
TransitionMatrix transition_matrix(int num_states, double stay_prob);

}  // namespace phmm
