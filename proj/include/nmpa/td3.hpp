#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmpa/adam.hpp"
#include "nmpa/eval.hpp"
#include "nmpa/policy.hpp"
#include "nmpa/replay.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nmpa {

struct TrainConfig {
  double actor_lr = 5e-4;
  double critic_lr = 1e-3;
  double polyak_tau = 1e-3;
  int batch_size = 32;
  int policy_delay = 2;
  double target_noise_std = 0.2;
  double target_noise_clip = 0.5;
  double explore_noise_std = 0.1;
  int max_episodes = 10000;
  int episode_length = 100;
  int warmup_steps = 1000;  // random-scale steps before any gradient update
  // Env steps before policy-gradient steps begin. Until then only the critics
  // learn (targets still track via Polyak), so the first actor moves follow a
  // critic that already separates healthy from depleted batteries instead of
  // shoving every scale toward the penalty-free silent policy.
  int actor_delay_steps = 20000;
  std::uint64_t buffer_capacity = 100000;
  int eval_interval = 100;  // training episodes between held-out evaluations
  int eval_episodes = 5;
  int patience = 20;        // evaluations without improvement before stopping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool parallel = true;

  void validate() const;
};

struct Td3Nets {
  ActorNet actor;
  CriticNet critic1;
  CriticNet critic2;
  ActorNet target_actor;
  CriticNet target_critic1;
  CriticNet target_critic2;
};

// Online nets from the init stream; targets start as exact copies.
Td3Nets init_nets(const ModelConfig& cfg, std::uint64_t root_seed);

// psi' <- tau * psi + (1 - tau) * psi' for all three targets.
void polyak_update(Td3Nets& nets, double tau);

struct TrainingDivergence : std::runtime_error {
  long long update_index;
  TrainingDivergence(const char* what, long long idx)
      : std::runtime_error(std::string(what) + " at update " + std::to_string(idx)),
        update_index(idx) {}
};

struct EvalRecord {
  int episode = 0;
  double mean_episodic_sum_rate = 0.0;
  double mean_violations_per_tx = 0.0;
  // Undiscounted episodic reward: sum-rate minus the violation penalties.
  // Best-checkpoint selection and early stopping track this.
  double mean_episodic_return = 0.0;
  double critic1_loss = 0.0;  // most recent losses at evaluation time
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  bool improved = false;
};

struct TrainReport {
  std::vector<EvalRecord> records;
  int episodes_run = 0;
  long long env_steps = 0;
  long long updates = 0;
  int best_episode = -1;
  double best_eval = 0.0;
  bool early_stopped = false;
};

struct TrainHooks {
  // Called after every held-out evaluation; `best` marks a new best policy.
  std::function<void(const Td3Nets& nets, const EvalRecord& rec, bool best)> on_eval;
};

struct CriticLosses {
  double critic1 = 0.0;
  double critic2 = 0.0;
};

// Off-policy trainer: replay buffer, twin critics with a smoothed target
// policy, delayed actor updates with Polyak-averaged targets.
class Td3Trainer {
 public:
  Td3Trainer(TopologyConfig topo, EnvConfig env, WmmseConfig wmmse, ModelConfig model,
             TrainConfig train, std::uint64_t root_seed);

  // One gradient step on both critics over the given buffer indices.
  CriticLosses critic_update(const std::vector<size_t>& indices);

  // One deterministic policy-gradient step plus the Polyak target update.
  double actor_update(const std::vector<size_t>& indices);

  // Full training loop; returns the per-evaluation report. The best-eval
  // policy is restored into nets() before returning.
  TrainReport train(const TrainHooks& hooks = {});

  Td3Nets& nets() { return nets_; }
  const Td3Nets& nets() const { return nets_; }
  void set_nets(const Td3Nets& nets) { nets_ = nets; }
  ReplayBuffer& buffer() { return buffer_; }
  const TrainConfig& train_config() const { return train_; }

  // Continue a run from a saved policy. Episode indices (and their derived
  // streams) pick up at `episode`; the replay buffer restarts empty, so the
  // resumed trajectory is not bit-identical to an uninterrupted one.
  void resume_from(const Td3Nets& nets, int episode);

  // Mean episodic sum-rate / violations of the current policy on the fixed
  // held-out episodes.
  EvalRecord evaluate(int episode_index);

 private:
  void rollout_episode(int episode_index, TrainReport& report);

  TopologyConfig topo_;
  EnvConfig env_;
  WmmseConfig wmmse_;
  ModelConfig model_;
  TrainConfig train_;
  std::uint64_t root_seed_;

  Td3Nets nets_;
  ReplayBuffer buffer_;
  Adam actor_opt_;
  Adam critic1_opt_;
  Adam critic2_opt_;

  RngStream exploration_rng_;
  RngStream sample_rng_;
  RngStream target_noise_rng_;

  long long env_steps_ = 0;
  long long critic_updates_ = 0;
  int start_episode_ = 0;
  CriticLosses last_critic_losses_;
  double last_actor_loss_ = 0.0;
};

// Checkpoints carry the three online nets, their targets, and a manifest.
struct CheckpointManifest {
  std::string config_hash;
  int episode = 0;
};

nlohmann::json checkpoint_to_json(const Td3Nets& nets, const CheckpointManifest& manifest);
Td3Nets checkpoint_nets_from_json(const nlohmann::json& j);
void save_checkpoint(const std::string& path, const Td3Nets& nets,
                     const CheckpointManifest& manifest);

struct LoadedCheckpoint {
  Td3Nets nets;
  CheckpointManifest manifest;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

void write_report_jsonl(std::ostream& os, const TrainReport& report);

}  // namespace nmpa
