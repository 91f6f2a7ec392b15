#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmpa/policy.hpp"
#include "nmpa/td3.hpp"
#include "nmpa/topology.hpp"
#include "nmpa/wmmse.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nmpa {

struct EvalConfig {
  int episodes = 10;
  int length = 100;
  std::vector<int> sweep_lengths = {30, 60, 100, 150};
  int histogram_bins = 20;
};

// Everything a run needs; a run directory always keeps the resolved copy.
struct RunConfig {
  std::uint64_t seed = 1;
  TopologyConfig topology;
  EnvConfig env;
  int wmmse_iterations = 4;
  double wmmse_epsilon = 1e-12;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;

  WmmseConfig wmmse() const {
    WmmseConfig cfg;
    cfg.iterations = wmmse_iterations;
    cfg.epsilon = wmmse_epsilon;
    cfg.p_max = env.p_max;
    cfg.sigma_n = env.sigma_n;
    return cfg;
  }

  void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

// Load a config file; unknown keys are rejected so typos surface. Missing
// keys fall back to the defaults above.
RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& cfg);

// FNV-1a over the canonical dump of the semantic sections (topology, env,
// wmmse, model). Training and evaluation knobs do not change what a
// checkpoint means, so they stay outside the hash.
std::string config_hash(const RunConfig& cfg);

}  // namespace nmpa
