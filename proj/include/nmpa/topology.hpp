#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nmpa/rng.hpp"

namespace nmpa {

enum class TopologyMode { Uniform, Good, Poor, Mixed };

const char* to_string(TopologyMode mode);
TopologyMode topology_mode_from_string(const std::string& s);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Deployment parameters: m transmitter/receiver pairs dropped in the square
// [-side, side]^2, every transmitter with the same range.
struct TopologyConfig {
  int m = 10;
  double side = 60.0;
  double range = 20.0;
  TopologyMode mode = TopologyMode::Mixed;

  void validate() const {
    if (m < 1) throw std::invalid_argument("TopologyConfig: m must be >= 1");
    if (side <= 0.0) throw std::invalid_argument("TopologyConfig: side must be > 0");
    if (range <= 0.0 || range > 2.0 * side)
      throw std::invalid_argument("TopologyConfig: range must be in (0, 2*side]");
  }
};

// One dropped network: transmitter/receiver positions and, for each receiver,
// the transmitters (other than its own) within range of it.
struct Topology {
  std::vector<Point2> tx;
  std::vector<Point2> rx;
  std::vector<std::vector<int>> interferers;
  double range = 0.0;

  int size() const { return static_cast<int>(tx.size()); }

  // Builds interference sets from explicit positions.
  static Topology from_positions(std::vector<Point2> tx_pos, std::vector<Point2> rx_pos,
                                 double range);
};

// Draws one topology of the requested mode. Mixed picks good or poor with
// probability 1/2 per call.
Topology sample_topology(const TopologyConfig& cfg, RngStream& rng,
                         TopologyMode* drawn_mode = nullptr);

}  // namespace nmpa
