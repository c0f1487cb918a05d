#pragma once

// Exhaustive path enumeration for small HMM instances. Test-only oracle:
// shares nothing with the library's recursions or its log-pmf.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace phmm::testing {

struct BruteForce {
  long double likelihood = 0;             // sum over paths of p(x, z)
  std::vector<std::vector<long double>> marginals;  // [t][k], k 0-based
  std::vector<int> map_path;              // 1-based, first maximum in lexicographic order
  long double map_prob = 0;
  int map_ties = 0;                       // other paths within 1e-12 relative of map_prob
};

inline long double poisson_pmf(std::int64_t x, long double rate) {
  long double p = std::exp(-rate);
  for (std::int64_t i = 1; i <= x; ++i) p *= rate / static_cast<long double>(i);
  return p;
}

inline long double path_prob(const std::vector<std::int64_t>& counts,
                             const std::vector<double>& rates, double stay,
                             const std::vector<int>& path) {
  const std::size_t K = rates.size();
  const long double off = K > 1 ? (1.0L - stay) / static_cast<long double>(K - 1) : 0.0L;
  const long double diag = K > 1 ? static_cast<long double>(stay) : 1.0L;
  long double p = 1.0L / static_cast<long double>(K);
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (t > 0) p *= path[t] == path[t - 1] ? diag : off;
    p *= poisson_pmf(counts[t], rates[static_cast<std::size_t>(path[t] - 1)]);
  }
  return p;
}

inline BruteForce enumerate_paths(const std::vector<std::int64_t>& counts,
                                  const std::vector<double>& rates, double stay) {
  const std::size_t T = counts.size();
  const std::size_t K = rates.size();
  const long double off = K > 1 ? (1.0L - stay) / static_cast<long double>(K - 1) : 0.0L;
  const long double diag = K > 1 ? static_cast<long double>(stay) : 1.0L;

  BruteForce out;
  out.marginals.assign(T, std::vector<long double>(K, 0.0L));
  std::vector<std::size_t> path(T, 0);
  long double best = -1;

  std::size_t total = 1;
  for (std::size_t t = 0; t < T; ++t) total *= K;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t t = T; t-- > 0;) {
      path[t] = c % K;
      c /= K;
    }
    long double p = 1.0L / static_cast<long double>(K);
    for (std::size_t t = 0; t < T; ++t) {
      if (t > 0) p *= path[t] == path[t - 1] ? diag : off;
      p *= poisson_pmf(counts[t], rates[path[t]]);
    }
    out.likelihood += p;
    for (std::size_t t = 0; t < T; ++t) out.marginals[t][path[t]] += p;
    if (p > best * (1.0L + 1e-12L)) {
      best = p;
      out.map_ties = 0;
      out.map_path.assign(T, 0);
      for (std::size_t t = 0; t < T; ++t) out.map_path[t] = static_cast<int>(path[t]) + 1;
    } else if (p >= best * (1.0L - 1e-12L)) {
      ++out.map_ties;
    }
  }
  out.map_prob = best;
  for (auto& row : out.marginals) {
    for (auto& v : row) v /= out.likelihood;
  }
  return out;
}

}  // namespace phmm::testing
