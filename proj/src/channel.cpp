#include "nmpa/channel.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace nmpa {

ChannelMatrix sample_channel(const Topology& topo, RngStream& fading, int time_index,
                             TopologyMode label) {
  const int m = topo.size();
  ChannelMatrix ch;
  ch.m = m;
  ch.time_index = time_index;
  ch.label = label;
  ch.entries = Mat(m, m);
  for (int i = 0; i < m; ++i) {
    ch.entries(i, i) = path_loss(distance(topo.tx[i], topo.rx[i])) * fading.rayleigh_unit();
    for (int j : topo.interferers[i])
      ch.entries(i, j) = path_loss(distance(topo.tx[j], topo.rx[i])) * fading.rayleigh_unit();
  }
  return ch;
}

Episode sample_episode(const TopologyConfig& cfg, int length, RngStream& topology_rng,
                       RngStream& fading_rng) {
  if (length < 1) throw std::invalid_argument("sample_episode: length must be >= 1");
  Episode ep;
  ep.steps.reserve(length);
  for (int t = 1; t <= length; ++t) {
    TopologyMode drawn = cfg.mode;
    const Topology topo = sample_topology(cfg, topology_rng, &drawn);
    ep.steps.push_back(sample_channel(topo, fading_rng, t, drawn));
  }
  return ep;
}

void write_episode_jsonl(std::ostream& os, const Episode& episode) {
  for (const ChannelMatrix& ch : episode.steps) {
    nlohmann::json rec;
    rec["t"] = ch.time_index;
    rec["topology"] = to_string(ch.label);
    rec["h"] = ch.entries.a;
    os << rec.dump() << '\n';
  }
}

Episode read_episode_jsonl(std::istream& is) {
  Episode ep;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json rec = nlohmann::json::parse(line);
    ChannelMatrix ch;
    ch.time_index = rec.at("t").get<int>();
    ch.label = topology_mode_from_string(rec.at("topology").get<std::string>());
    Vec h = rec.at("h").get<Vec>();
    const int m = static_cast<int>(std::llround(std::sqrt(static_cast<double>(h.size()))));
    if (static_cast<size_t>(m) * m != h.size())
      throw std::runtime_error("episode record: matrix is not square");
    ch.m = m;
    ch.entries = Mat(m, m, std::move(h));
    ep.steps.push_back(std::move(ch));
  }
  return ep;
}

}  // namespace nmpa
