#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "phmm/errors.hpp"
#include "phmm/model.hpp"

namespace phmm {
namespace {

using std::chrono::sys_days;
using namespace std::chrono_literals;

TEST(PoissonLogPmf, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(poisson_log_pmf(0, 1.0), -1.0);
  EXPECT_DOUBLE_EQ(poisson_log_pmf(1, 1.0), -1.0);
  // 3 ln 2.5 - 2.5 - ln 6, evaluated at 40 digits with mpmath.
  EXPECT_NEAR(poisson_log_pmf(3, 2.5), -1.5428872736055898, 1e-13);
}

TEST(PoissonLogPmf, RejectsOutOfDomain) {
  EXPECT_THROW(poisson_log_pmf(-1, 1.0), DomainError);
  EXPECT_THROW(poisson_log_pmf(2, 0.0), DomainError);
  EXPECT_THROW(poisson_log_pmf(2, kRateFloor / 2), DomainError);
  EXPECT_NO_THROW(poisson_log_pmf(2, kRateFloor));
}

TEST(PoissonLogPmf, FiniteAtExtremes) {
  EXPECT_TRUE(std::isfinite(poisson_log_pmf(1'000'000, kRateFloor)));
  EXPECT_TRUE(std::isfinite(poisson_log_pmf(0, 1e6)));
  EXPECT_TRUE(std::isfinite(poisson_log_pmf(1'000'000, 1e6)));
}

TEST(PoissonLogPmf, SumsToOne) {
  for (double rate : {0.1, 1.0, 10.0, 100.0}) {
    const auto upper = static_cast<Count>(std::ceil(rate + 20.0 * std::sqrt(rate) + 20.0));
    long double total = 0;
    for (Count x = 0; x <= upper; ++x) total += std::exp(static_cast<long double>(poisson_log_pmf(x, rate)));
    EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-9) << "rate " << rate;
  }
}

TEST(TransitionMatrix, SingleState) {
  const auto a = transition_matrix(1, 0.95);
  EXPECT_EQ(a.num_states(), 1);
  EXPECT_EQ(a(1, 1), 1.0);
}

TEST(TransitionMatrix, FourStatesSplitsOffDiagonalMassEvenly) {
  const auto a = transition_matrix(4, 0.7);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) EXPECT_NEAR(a(i, j), i == j ? 0.7 : 0.1, 1e-15);
  }
}

TEST(TransitionMatrix, RowsSumToOne) {
  for (int k = 1; k <= 64; ++k) {
    for (double p : {0.01, 0.5, 0.99}) {
      const auto a = transition_matrix(k, p);
      for (int i = 1; i <= k; ++i) {
        long double sum = 0;
        for (int j = 1; j <= k; ++j) sum += a(i, j);
        EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-15) << "K=" << k << " p=" << p;
        EXPECT_NEAR(a.row_sum(i), 1.0, 1e-15);
      }
    }
  }
}

TEST(TransitionMatrix, Errors) {
  EXPECT_THROW(transition_matrix(0, 0.5), DomainError);
  EXPECT_THROW(transition_matrix(2, 0.0), DomainError);
  EXPECT_THROW(transition_matrix(2, 1.0), DomainError);
  EXPECT_NO_THROW(transition_matrix(1, 1.0));
  EXPECT_THROW(transition_matrix(3, 0.5)(0, 1), DomainError);
  EXPECT_THROW(transition_matrix(3, 0.5)(1, 4), DomainError);
}

TEST(PoissonHmm, Invariants) {
  EXPECT_THROW(PoissonHmm({}), DomainError);
  EXPECT_THROW(PoissonHmm({1.0, 0.0}), DomainError);
  EXPECT_THROW(PoissonHmm({1.0, NAN}), DomainError);
  EXPECT_THROW(PoissonHmm({1.0, 2.0}, 1.0), DomainError);
  EXPECT_NO_THROW(PoissonHmm({1.0}, 1.5));  // p is ignored for one state

  const PoissonHmm m({4.0, 9.0}, 0.8);
  EXPECT_EQ(m.num_states(), 2);
  EXPECT_EQ(m.rate(1), 4.0);
  EXPECT_EQ(m.rate(2), 9.0);
  EXPECT_THROW(m.rate(0), DomainError);
  EXPECT_THROW(m.rate(3), DomainError);
  EXPECT_NEAR(m.switch_prob(), 0.2, 1e-15);
  EXPECT_EQ(PoissonHmm({3.0}).diagonal_prob(), 1.0);
}

TEST(ObservationSeries, Invariants) {
  const sys_days start = std::chrono::year{2023} / 3 / 27;
  EXPECT_THROW(ObservationSeries(start, {}), DomainError);
  EXPECT_THROW(ObservationSeries(start, {1, -1}), DomainError);

  const ObservationSeries s(start, {14, 9, 0});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.date_at(1), start + std::chrono::days(1));
  EXPECT_EQ(s.end_date(), sys_days{std::chrono::year{2023} / 3 / 29});
  EXPECT_EQ(s.total(), 23);
  EXPECT_DOUBLE_EQ(s.mean(), 23.0 / 3.0);
}

TEST(StateSequence, RejectsZeroBasedLabels) {
  EXPECT_THROW(StateSequence({1, 0, 2}), DomainError);
  EXPECT_EQ(StateSequence({1, 2, 2}).size(), 3u);
}

}  // namespace
}  // namespace phmm
