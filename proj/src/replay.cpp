#include "nmpa/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace nmpa {

std::vector<size_t> ReplayBuffer::sample_indices(size_t count, RngStream& rng) const {
  if (count > storage_.size())
    throw std::logic_error("ReplayBuffer: batch larger than buffer");
  std::vector<size_t> picked;
  picked.reserve(count);
  while (picked.size() < count) {
    const size_t idx = static_cast<size_t>(rng.below(storage_.size()));
    if (std::find(picked.begin(), picked.end(), idx) == picked.end()) picked.push_back(idx);
  }
  return picked;
}

}  // namespace nmpa
