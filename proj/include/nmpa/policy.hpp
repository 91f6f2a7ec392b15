#pragma once

#include "nmpa/env.hpp"
#include "nmpa/gcnn.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nmpa {

struct ModelConfig {
  int hidden = 32;
  int critic_channels = 32;       // GCNN output width feeding the critic readout
  double leaky_slope = 0.01;
  double output_scale = 1e-3;     // init bound factor for the output-layer taps
  bool normalize_battery = false; // divide the battery feature by b_max
  bool normalize_powers = false;  // operator-norm cap on H before taking powers
};

// Per-transmitter scale head: battery in, sigmoid out.
struct ActorNet {
  GcnnParams gcnn;
};

// Q-network: [battery, action-scale] node features through a GCNN with
// identity output, then mean-over-nodes with an affine readout.
struct CriticNet {
  GcnnParams gcnn;
  Vec readout_w;
  double readout_b = 0.0;
};

ActorNet init_actor(const ModelConfig& cfg, RngStream& rng);
CriticNet init_critic(const ModelConfig& cfg, RngStream& rng);

// Actor feature column (optionally b / b_max).
Mat actor_features(const BatteryState& b, const ModelConfig& cfg, const EnvConfig& env);

// Scale vector mu(b, H) in (0,1)^M.
Vec actor_scales(const ActorNet& actor, const GraphPowers& powers, const Mat& features,
                 GcnnCache* cache = nullptr);

// p = mu(b, H) element-wise times p_bar; stays inside [0, p_max] by
// construction.
Vec act(const ActorNet& actor, const GraphPowers& powers, const BatteryState& b,
        const Vec& p_bar, const ModelConfig& cfg, const EnvConfig& env);

// Exploration variant: the scale is perturbed with clipped Gaussian noise
// before multiplying. Returns the perturbed scale when `scale_out` is given.
Vec act_explore(const ActorNet& actor, const GraphPowers& powers, const BatteryState& b,
                const Vec& p_bar, const ModelConfig& cfg, const EnvConfig& env,
                double noise_std, RngStream& rng, Vec* scale_out = nullptr);

// Critic node features: column 0 battery, column 1 action scale.
Mat critic_features(const BatteryState& b, const Vec& action_scale, const ModelConfig& cfg,
                    const EnvConfig& env);

double critic_value(const CriticNet& critic, const GraphPowers& powers, const Mat& features,
                    GcnnCache* cache = nullptr);

struct CriticGrads {
  GcnnGrads gcnn;
  Vec readout_w;
  double readout_b = 0.0;

  void init_like(const CriticNet& critic);
  void zero();
  void add(const CriticGrads& other);
};

// Reverse-mode gradients of dq (a scalar upstream) through the critic.
// When dx is given, also returns the gradient w.r.t. the node features, from
// which the action column drives the actor update.
void critic_backward(const CriticNet& critic, const GraphPowers& powers,
                     const GcnnCache& cache, double dq, CriticGrads* grads,
                     Mat* dx = nullptr);

nlohmann::json actor_to_json(const ActorNet& actor);
ActorNet actor_from_json(const nlohmann::json& j);
nlohmann::json critic_to_json(const CriticNet& critic);
CriticNet critic_from_json(const nlohmann::json& j);

}  // namespace nmpa
