#include "nmpa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nmpa {

void RunConfig::validate() const {
  topology.validate();
  env.validate();
  wmmse().validate();
  train.validate();
  if (eval.episodes < 1) throw std::invalid_argument("eval.episodes must be >= 1");
  if (eval.length < 1) throw std::invalid_argument("eval.length must be >= 1");
  if (eval.histogram_bins < 1) throw std::invalid_argument("eval.histogram_bins must be >= 1");
  for (int len : eval.sweep_lengths)
    if (len < 1) throw std::invalid_argument("eval.sweep_lengths entries must be >= 1");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["topology"] = {{"m", cfg.topology.m},
                   {"side", cfg.topology.side},
                   {"range", cfg.topology.range},
                   {"mode", to_string(cfg.topology.mode)}};
  j["env"] = {{"p_max", cfg.env.p_max},
              {"b_max", cfg.env.b_max},
              {"alpha", cfg.env.alpha},
              {"penalty", cfg.env.penalty},
              {"sigma_n", cfg.env.sigma_n},
              {"gamma", cfg.env.gamma},
              {"horizon", cfg.env.horizon},
              {"tx_threshold", cfg.env.tx_threshold}};
  j["wmmse"] = {{"iterations", cfg.wmmse_iterations}, {"epsilon", cfg.wmmse_epsilon}};
  j["model"] = {{"hidden", cfg.model.hidden},
                {"critic_channels", cfg.model.critic_channels},
                {"leaky_slope", cfg.model.leaky_slope},
                {"output_scale", cfg.model.output_scale},
                {"normalize_battery", cfg.model.normalize_battery},
                {"normalize_powers", cfg.model.normalize_powers}};
  j["train"] = {{"actor_lr", cfg.train.actor_lr},
                {"critic_lr", cfg.train.critic_lr},
                {"polyak_tau", cfg.train.polyak_tau},
                {"batch_size", cfg.train.batch_size},
                {"policy_delay", cfg.train.policy_delay},
                {"target_noise_std", cfg.train.target_noise_std},
                {"target_noise_clip", cfg.train.target_noise_clip},
                {"explore_noise_std", cfg.train.explore_noise_std},
                {"max_episodes", cfg.train.max_episodes},
                {"episode_length", cfg.train.episode_length},
                {"warmup_steps", cfg.train.warmup_steps},
                {"buffer_capacity", cfg.train.buffer_capacity},
                {"eval_interval", cfg.train.eval_interval},
                {"eval_episodes", cfg.train.eval_episodes},
                {"patience", cfg.train.patience},
                {"adam_beta1", cfg.train.adam_beta1},
                {"adam_beta2", cfg.train.adam_beta2},
                {"adam_eps", cfg.train.adam_eps},
                {"parallel", cfg.train.parallel}};
  j["eval"] = {{"episodes", cfg.eval.episodes},
               {"length", cfg.eval.length},
               {"sweep_lengths", cfg.eval.sweep_lengths},
               {"histogram_bins", cfg.eval.histogram_bins}};
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  reject_unknown(j, {"seed", "topology", "env", "wmmse", "model", "train", "eval"}, "root");
  maybe(j, "seed", cfg.seed);
  if (j.contains("topology")) {
    const json& t = j.at("topology");
    reject_unknown(t, {"m", "side", "range", "mode"}, "topology");
    maybe(t, "m", cfg.topology.m);
    maybe(t, "side", cfg.topology.side);
    maybe(t, "range", cfg.topology.range);
    if (t.contains("mode"))
      cfg.topology.mode = topology_mode_from_string(t.at("mode").get<std::string>());
  }
  if (j.contains("env")) {
    const json& e = j.at("env");
    reject_unknown(e, {"p_max", "b_max", "alpha", "penalty", "sigma_n", "gamma", "horizon",
                       "tx_threshold"},
                   "env");
    maybe(e, "p_max", cfg.env.p_max);
    maybe(e, "b_max", cfg.env.b_max);
    maybe(e, "alpha", cfg.env.alpha);
    maybe(e, "penalty", cfg.env.penalty);
    maybe(e, "sigma_n", cfg.env.sigma_n);
    maybe(e, "gamma", cfg.env.gamma);
    maybe(e, "horizon", cfg.env.horizon);
    maybe(e, "tx_threshold", cfg.env.tx_threshold);
  }
  if (j.contains("wmmse")) {
    const json& w = j.at("wmmse");
    reject_unknown(w, {"iterations", "epsilon"}, "wmmse");
    maybe(w, "iterations", cfg.wmmse_iterations);
    maybe(w, "epsilon", cfg.wmmse_epsilon);
  }
  if (j.contains("model")) {
    const json& mo = j.at("model");
    reject_unknown(mo, {"hidden", "critic_channels", "leaky_slope", "output_scale",
                        "normalize_battery", "normalize_powers"},
                   "model");
    maybe(mo, "hidden", cfg.model.hidden);
    maybe(mo, "critic_channels", cfg.model.critic_channels);
    maybe(mo, "leaky_slope", cfg.model.leaky_slope);
    maybe(mo, "output_scale", cfg.model.output_scale);
    maybe(mo, "normalize_battery", cfg.model.normalize_battery);
    maybe(mo, "normalize_powers", cfg.model.normalize_powers);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t,
                   {"actor_lr", "critic_lr", "polyak_tau", "batch_size", "policy_delay",
                    "target_noise_std", "target_noise_clip", "explore_noise_std",
                    "max_episodes", "episode_length", "warmup_steps", "buffer_capacity",
                    "eval_interval", "eval_episodes", "patience", "adam_beta1", "adam_beta2",
                    "adam_eps", "parallel"},
                   "train");
    maybe(t, "actor_lr", cfg.train.actor_lr);
    maybe(t, "critic_lr", cfg.train.critic_lr);
    maybe(t, "polyak_tau", cfg.train.polyak_tau);
    maybe(t, "batch_size", cfg.train.batch_size);
    maybe(t, "policy_delay", cfg.train.policy_delay);
    maybe(t, "target_noise_std", cfg.train.target_noise_std);
    maybe(t, "target_noise_clip", cfg.train.target_noise_clip);
    maybe(t, "explore_noise_std", cfg.train.explore_noise_std);
    maybe(t, "max_episodes", cfg.train.max_episodes);
    maybe(t, "episode_length", cfg.train.episode_length);
    maybe(t, "warmup_steps", cfg.train.warmup_steps);
    maybe(t, "buffer_capacity", cfg.train.buffer_capacity);
    maybe(t, "eval_interval", cfg.train.eval_interval);
    maybe(t, "eval_episodes", cfg.train.eval_episodes);
    maybe(t, "patience", cfg.train.patience);
    maybe(t, "adam_beta1", cfg.train.adam_beta1);
    maybe(t, "adam_beta2", cfg.train.adam_beta2);
    maybe(t, "adam_eps", cfg.train.adam_eps);
    maybe(t, "parallel", cfg.train.parallel);
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    reject_unknown(e, {"episodes", "length", "sweep_lengths", "histogram_bins"}, "eval");
    maybe(e, "episodes", cfg.eval.episodes);
    maybe(e, "length", cfg.eval.length);
    maybe(e, "sweep_lengths", cfg.eval.sweep_lengths);
    maybe(e, "histogram_bins", cfg.eval.histogram_bins);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  RunConfig cfg = run_config_from_json(j);
  cfg.validate();
  return cfg;
}

void save_run_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config file: " + path);
  os << run_config_to_json(cfg).dump(2) << '\n';
}

std::string config_hash(const RunConfig& cfg) {
  const json j = run_config_to_json(cfg);
  json semantic;
  semantic["topology"] = j.at("topology");
  semantic["env"] = j.at("env");
  semantic["wmmse"] = j.at("wmmse");
  semantic["model"] = j.at("model");
  const std::string dump = semantic.dump();
  const std::uint64_t h = detail::fnv1a64(dump);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace nmpa
