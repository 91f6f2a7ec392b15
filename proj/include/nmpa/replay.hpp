#pragma once

#include <cstddef>
#include <vector>

#include "nmpa/channel.hpp"
#include "nmpa/rng.hpp"

namespace nmpa {

// Stored action is the pre-multiplication scale, so the buffer stays agnostic
// to the lower-level solver. Terminal transitions leave next_* empty.
struct Transition {
  Vec battery;
  ChannelMatrix channel;
  Vec p_bar;
  Vec action_scale;
  double reward = 0.0;
  Vec next_battery;
  ChannelMatrix next_channel;
  Vec next_p_bar;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity = 100000) : capacity_(capacity) {}

  size_t size() const { return storage_.size(); }
  size_t capacity() const { return capacity_; }

  void push(Transition t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  const Transition& operator[](size_t i) const { return storage_[i]; }

  // Uniform sample of `count` distinct indices.
  std::vector<size_t> sample_indices(size_t count, RngStream& rng) const;

 private:
  size_t capacity_;
  size_t head_ = 0;  // oldest slot once full
  std::vector<Transition> storage_;
};

}  // namespace nmpa
