#pragma once

#include <stdexcept>
#include <vector>

#include "nmpa/channel.hpp"

namespace nmpa {

struct WmmseConfig {
  int iterations = 4;
  double p_max = 1.0;
  double sigma_n = 1e-2;
  double epsilon = 1e-12;  // denominator guard for the w and v updates

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("WmmseConfig: iterations must be >= 1");
    if (p_max <= 0.0) throw std::invalid_argument("WmmseConfig: p_max must be > 0");
    if (sigma_n <= 0.0) throw std::invalid_argument("WmmseConfig: sigma_n must be > 0");
    if (epsilon <= 0.0) throw std::invalid_argument("WmmseConfig: epsilon must be > 0");
  }
};

struct SolverDivergence : std::runtime_error {
  int iteration;
  explicit SolverDivergence(int iter)
      : std::runtime_error("wmmse_solve: non-finite intermediate at iteration " +
                           std::to_string(iter)),
        iteration(iter) {}
};

// Battery-agnostic instantaneous allocation for one CSI matrix. Runs the
// scalar u/w/v block-coordinate updates from the full-power start, then
// returns the best of {BCD output, full power, single-user corners} under the
// instantaneous sum-rate. The corner sweep covers symmetric instances where
// the BCD iteration sits at its symmetric stationary point.
Vec wmmse_solve(const ChannelMatrix& ch, const WmmseConfig& cfg);

// Sum of per-link rates; convenience wrapper over the environment rate.
double sum_rate_of(const ChannelMatrix& ch, const Vec& p, double sigma_n);

// Independent solves over a batch of CSI matrices. The parallel kernel is
// bit-identical to the serial reference because items never interact.
std::vector<Vec> wmmse_solve_batch(const std::vector<ChannelMatrix>& channels,
                                   const WmmseConfig& cfg);
std::vector<Vec> wmmse_solve_batch_serial(const std::vector<ChannelMatrix>& channels,
                                          const WmmseConfig& cfg);

}  // namespace nmpa
