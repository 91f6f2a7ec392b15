#pragma once

#include <cstdint>
#include <vector>

namespace nmpa {

struct GradCheckResult {
  double max_rel_error = 0.0;
  int instances = 0;
  long long coordinates = 0;
};

// Central finite differences against the analytic backward pass, for every
// tap tensor, the critic readout, and the input signals, over randomized
// actor- and critic-shaped instances. The differencing side only ever calls
// the forward map.
GradCheckResult run_gradcheck(int instances, const std::vector<int>& sizes,
                              std::uint64_t seed, int hidden = 32, double fd_step = 1e-5,
                              bool parallel = true);

}  // namespace nmpa
