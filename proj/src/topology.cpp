#include "nmpa/topology.hpp"

#include <algorithm>
#include <cmath>

namespace nmpa {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Good drops keep transmitters far apart (pairwise spacing >= 30 units at the
// benchmark scale) with receivers close by, so direct links dominate.
constexpr double kGoodMinSpacing = 30.0;
constexpr double kGoodRxDistLo = 2.0;
constexpr double kGoodRxDistHi = 6.0;

// Poor drops cram all transmitters into a small disc with receivers pushed
// out, so interference is comparable to the direct links.
constexpr double kPoorDiscRadius = 10.0;
constexpr double kPoorRxDistLo = 10.0;
constexpr double kPoorRxDistHi = 14.0;

Point2 offset_at(const Point2& c, double dist, double angle) {
  return {c.x + dist * std::cos(angle), c.y + dist * std::sin(angle)};
}
}  // namespace

const char* to_string(TopologyMode mode) {
  switch (mode) {
    case TopologyMode::Uniform: return "uniform";
    case TopologyMode::Good: return "good";
    case TopologyMode::Poor: return "poor";
    case TopologyMode::Mixed: return "mixed";
  }
  return "?";
}

TopologyMode topology_mode_from_string(const std::string& s) {
  if (s == "uniform") return TopologyMode::Uniform;
  if (s == "good") return TopologyMode::Good;
  if (s == "poor") return TopologyMode::Poor;
  if (s == "mixed") return TopologyMode::Mixed;
  throw std::invalid_argument("unknown topology mode: " + s);
}

Topology Topology::from_positions(std::vector<Point2> tx_pos, std::vector<Point2> rx_pos,
                                  double range) {
  if (tx_pos.size() != rx_pos.size())
    throw std::invalid_argument("Topology: tx/rx position counts differ");
  Topology topo;
  topo.tx = std::move(tx_pos);
  topo.rx = std::move(rx_pos);
  topo.range = range;
  const int m = topo.size();
  topo.interferers.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      if (distance(topo.tx[j], topo.rx[i]) <= range) topo.interferers[i].push_back(j);
    }
  }
  return topo;
}

namespace {

void drop_uniform(const TopologyConfig& cfg, RngStream& rng, std::vector<Point2>& tx,
                  std::vector<Point2>& rx) {
  const double half_diag = cfg.range / std::sqrt(2.0);
  for (int i = 0; i < cfg.m; ++i)
    tx.push_back({rng.uniform(-cfg.side, cfg.side), rng.uniform(-cfg.side, cfg.side)});
  for (int i = 0; i < cfg.m; ++i)
    rx.push_back({rng.uniform(tx[i].x - half_diag, tx[i].x + half_diag),
                  rng.uniform(tx[i].y - half_diag, tx[i].y + half_diag)});
}

void drop_good(const TopologyConfig& cfg, RngStream& rng, std::vector<Point2>& tx,
               std::vector<Point2>& rx) {
  // Jittered grid over [-side, side]^2. The jitter radius is chosen so that
  // pairwise spacing stays >= kGoodMinSpacing whenever the pitch allows it.
  int per_axis = 1;
  while (per_axis * per_axis < cfg.m) ++per_axis;
  const double pitch = per_axis > 1 ? 2.0 * cfg.side / (per_axis - 1) : 0.0;
  const double jitter = std::max(0.0, (pitch - kGoodMinSpacing) / 2.0);

  std::vector<int> cells(static_cast<size_t>(per_axis) * per_axis);
  for (size_t c = 0; c < cells.size(); ++c) cells[c] = static_cast<int>(c);
  // Partial Fisher-Yates: the first m entries become the chosen cells.
  for (int i = 0; i < cfg.m; ++i) {
    const int j = i + static_cast<int>(rng.below(cells.size() - i));
    std::swap(cells[i], cells[j]);
  }
  for (int i = 0; i < cfg.m; ++i) {
    const int gx = cells[i] % per_axis;
    const int gy = cells[i] / per_axis;
    Point2 p{-cfg.side + gx * pitch, -cfg.side + gy * pitch};
    if (jitter > 0.0) {
      const double r = jitter * std::sqrt(rng.uniform());
      p = offset_at(p, r, rng.uniform(0.0, kTwoPi));
    }
    tx.push_back(p);
  }
  for (int i = 0; i < cfg.m; ++i)
    rx.push_back(offset_at(tx[i], rng.uniform(kGoodRxDistLo, kGoodRxDistHi),
                           rng.uniform(0.0, kTwoPi)));
}

void drop_poor(const TopologyConfig& cfg, RngStream& rng, std::vector<Point2>& tx,
               std::vector<Point2>& rx) {
  for (int i = 0; i < cfg.m; ++i) {
    const double r = kPoorDiscRadius * std::sqrt(rng.uniform());
    tx.push_back(offset_at({0.0, 0.0}, r, rng.uniform(0.0, kTwoPi)));
  }
  for (int i = 0; i < cfg.m; ++i)
    rx.push_back(offset_at(tx[i], rng.uniform(kPoorRxDistLo, kPoorRxDistHi),
                           rng.uniform(0.0, kTwoPi)));
}

}  // namespace

Topology sample_topology(const TopologyConfig& cfg, RngStream& rng, TopologyMode* drawn_mode) {
  cfg.validate();
  TopologyMode mode = cfg.mode;
  if (mode == TopologyMode::Mixed)
    mode = rng.uniform() < 0.5 ? TopologyMode::Good : TopologyMode::Poor;
  if (drawn_mode) *drawn_mode = mode;

  std::vector<Point2> tx, rx;
  tx.reserve(cfg.m);
  rx.reserve(cfg.m);
  switch (mode) {
    case TopologyMode::Uniform: drop_uniform(cfg, rng, tx, rx); break;
    case TopologyMode::Good: drop_good(cfg, rng, tx, rx); break;
    case TopologyMode::Poor: drop_poor(cfg, rng, tx, rx); break;
    case TopologyMode::Mixed: break;  // unreachable
  }
  return Topology::from_positions(std::move(tx), std::move(rx), cfg.range);
}

}  // namespace nmpa
