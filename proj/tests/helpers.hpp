#pragma once

#include <cmath>
#include <vector>

#include "nmpa/channel.hpp"
#include "nmpa/rng.hpp"

// Test-only oracles. These evaluate the definitions directly and never call
// the production solver/gradient paths they are checking.

namespace testing_oracles {

// Rate formula evaluated from scratch.
inline double rate_oracle(const nmpa::ChannelMatrix& ch, const std::vector<double>& p,
                          double sigma_n, int i) {
  double interference = sigma_n * sigma_n;
  for (int j = 0; j < ch.m; ++j)
    if (j != i) interference += ch(i, j) * ch(i, j) * p[j];
  return std::log2(1.0 + ch(i, i) * ch(i, i) * p[i] / interference);
}

inline double sum_rate_oracle(const nmpa::ChannelMatrix& ch, const std::vector<double>& p,
                              double sigma_n) {
  double s = 0.0;
  for (int i = 0; i < ch.m; ++i) s += rate_oracle(ch, p, sigma_n, i);
  return s;
}

// Exhaustive grid search over [0, p_max]^2 for M = 2 instances.
inline double grid_search_best_m2(const nmpa::ChannelMatrix& ch, double p_max, double sigma_n,
                                  int points_per_axis = 101) {
  double best = 0.0;
  const double pitch = p_max / (points_per_axis - 1);
  std::vector<double> p(2);
  for (int i = 0; i < points_per_axis; ++i)
    for (int j = 0; j < points_per_axis; ++j) {
      p[0] = i * pitch;
      p[1] = j * pitch;
      best = std::max(best, sum_rate_oracle(ch, p, sigma_n));
    }
  return best;
}

// Dense random CSI instance (all pairs in range), moderate magnitudes.
inline nmpa::ChannelMatrix random_dense_channel(int m, nmpa::RngStream& rng,
                                                double diag_lo = 0.3, double diag_hi = 1.5,
                                                double off_hi = 1.0) {
  nmpa::ChannelMatrix ch;
  ch.m = m;
  ch.entries = nmpa::Mat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ch.entries(i, j) = i == j ? rng.uniform(diag_lo, diag_hi) : rng.uniform(0.0, off_hi);
  return ch;
}

}  // namespace testing_oracles
