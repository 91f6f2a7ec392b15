#include "nmpa/policy.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace nmpa {

ActorNet init_actor(const ModelConfig& cfg, RngStream& rng) {
  ActorNet a;
  a.gcnn = init_gcnn(1, cfg.hidden, 1, rng, cfg.leaky_slope, cfg.output_scale);
  return a;
}

CriticNet init_critic(const ModelConfig& cfg, RngStream& rng) {
  CriticNet c;
  c.gcnn = init_gcnn(2, cfg.hidden, cfg.critic_channels, rng, cfg.leaky_slope, 1.0);
  const double bound = 1.0 / std::sqrt(cfg.critic_channels);
  c.readout_w.resize(cfg.critic_channels);
  for (double& w : c.readout_w) w = rng.uniform(-bound, bound);
  c.readout_b = 0.0;
  return c;
}

Mat actor_features(const BatteryState& b, const ModelConfig& cfg, const EnvConfig& env) {
  Mat x(b.size(), 1);
  const double scale = cfg.normalize_battery ? 1.0 / env.b_max : 1.0;
  for (int i = 0; i < b.size(); ++i) x(i, 0) = b.levels[i] * scale;
  return x;
}

Vec actor_scales(const ActorNet& actor, const GraphPowers& powers, const Mat& features,
                 GcnnCache* cache) {
  const Mat y = gcnn_forward(powers, features, actor.gcnn, OutputNonlinearity::Sigmoid, cache);
  return y.a;
}

Vec act(const ActorNet& actor, const GraphPowers& powers, const BatteryState& b,
        const Vec& p_bar, const ModelConfig& cfg, const EnvConfig& env) {
  const Vec scale = actor_scales(actor, powers, actor_features(b, cfg, env));
  Vec p(p_bar.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = scale[i] * p_bar[i];
  return p;
}

Vec act_explore(const ActorNet& actor, const GraphPowers& powers, const BatteryState& b,
                const Vec& p_bar, const ModelConfig& cfg, const EnvConfig& env,
                double noise_std, RngStream& rng, Vec* scale_out) {
  Vec scale = actor_scales(actor, powers, actor_features(b, cfg, env));
  for (double& s : scale) {
    if (noise_std > 0.0) s += rng.normal(0.0, noise_std);
    s = std::clamp(s, 0.0, 1.0);
  }
  Vec p(p_bar.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = scale[i] * p_bar[i];
  if (scale_out) *scale_out = std::move(scale);
  return p;
}

Mat critic_features(const BatteryState& b, const Vec& action_scale, const ModelConfig& cfg,
                    const EnvConfig& env) {
  Mat x(b.size(), 2);
  const double scale = cfg.normalize_battery ? 1.0 / env.b_max : 1.0;
  for (int i = 0; i < b.size(); ++i) {
    x(i, 0) = b.levels[i] * scale;
    x(i, 1) = action_scale[i];
  }
  return x;
}

double critic_value(const CriticNet& critic, const GraphPowers& powers, const Mat& features,
                    GcnnCache* cache) {
  const Mat y = gcnn_forward(powers, features, critic.gcnn, OutputNonlinearity::Identity, cache);
  const int m = y.rows;
  double q = critic.readout_b;
  for (int f = 0; f < y.cols; ++f) {
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += y(i, f);
    q += critic.readout_w[f] * mean / m;
  }
  return q;
}

void CriticGrads::init_like(const CriticNet& critic) {
  gcnn.init_like(critic.gcnn);
  readout_w.assign(critic.readout_w.size(), 0.0);
  readout_b = 0.0;
}

void CriticGrads::zero() {
  gcnn.zero();
  readout_w.assign(readout_w.size(), 0.0);
  readout_b = 0.0;
}

void CriticGrads::add(const CriticGrads& other) {
  gcnn.add(other.gcnn);
  for (size_t i = 0; i < readout_w.size(); ++i) readout_w[i] += other.readout_w[i];
  readout_b += other.readout_b;
}

void critic_backward(const CriticNet& critic, const GraphPowers& powers,
                     const GcnnCache& cache, double dq, CriticGrads* grads, Mat* dx) {
  const Mat& y = cache.y;
  const int m = y.rows;
  grads->init_like(critic);
  grads->readout_b = dq;
  Mat dy(m, y.cols);
  for (int f = 0; f < y.cols; ++f) {
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += y(i, f);
    grads->readout_w[f] = dq * mean / m;
    const double g = dq * critic.readout_w[f] / m;
    for (int i = 0; i < m; ++i) dy(i, f) = g;
  }
  gcnn_backward(powers, critic.gcnn, cache, OutputNonlinearity::Identity, dy, &grads->gcnn, dx);
}

nlohmann::json actor_to_json(const ActorNet& actor) {
  return {{"gcnn", gcnn_to_json(actor.gcnn)}};
}

ActorNet actor_from_json(const nlohmann::json& j) {
  return ActorNet{gcnn_from_json(j.at("gcnn"))};
}

nlohmann::json critic_to_json(const CriticNet& critic) {
  return {{"gcnn", gcnn_to_json(critic.gcnn)},
          {"readout_w", critic.readout_w},
          {"readout_b", critic.readout_b}};
}

CriticNet critic_from_json(const nlohmann::json& j) {
  CriticNet c;
  c.gcnn = gcnn_from_json(j.at("gcnn"));
  c.readout_w = j.at("readout_w").get<Vec>();
  c.readout_b = j.at("readout_b").get<double>();
  return c;
}

}  // namespace nmpa
