#pragma once

#include <iosfwd>
#include <vector>

#include "nmpa/mat.hpp"
#include "nmpa/rng.hpp"
#include "nmpa/topology.hpp"

namespace nmpa {

// CSI matrix for one time step. entries(i, j) is the gain from transmitter j
// to receiver i; the diagonal carries the direct links. Out-of-range pairs
// are hard zeros.
struct ChannelMatrix {
  int m = 0;
  int time_index = 0;
  TopologyMode label = TopologyMode::Uniform;
  Mat entries;

  double operator()(int i, int j) const { return entries(i, j); }
};

// Path loss 1 / (1 + d^2).
inline double path_loss(double dist) { return 1.0 / (1.0 + dist * dist); }

// Applies path loss and Rayleigh fading to the in-range pairs of a topology.
ChannelMatrix sample_channel(const Topology& topo, RngStream& fading, int time_index = 0,
                             TopologyMode label = TopologyMode::Uniform);

// A finite sequence of i.i.d. CSI matrices; a fresh topology is drawn per step.
struct Episode {
  std::vector<ChannelMatrix> steps;

  int length() const { return static_cast<int>(steps.size()); }
  int m() const { return steps.empty() ? 0 : steps.front().m; }
};

Episode sample_episode(const TopologyConfig& cfg, int length, RngStream& topology_rng,
                       RngStream& fading_rng);

// JSONL export/import: one record per step with the dense matrix row-major,
// the time index, and the topology label.
void write_episode_jsonl(std::ostream& os, const Episode& episode);
Episode read_episode_jsonl(std::istream& is);

}  // namespace nmpa
