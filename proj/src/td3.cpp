#include "nmpa/td3.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace nmpa {

void TrainConfig::validate() const {
  if (actor_lr <= 0.0 || critic_lr <= 0.0)
    throw std::invalid_argument("TrainConfig: learning rates must be > 0");
  if (polyak_tau <= 0.0 || polyak_tau > 1.0)
    throw std::invalid_argument("TrainConfig: polyak_tau must be in (0, 1]");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (policy_delay < 1) throw std::invalid_argument("TrainConfig: policy_delay must be >= 1");
  if (target_noise_std < 0.0 || target_noise_clip < 0.0 || explore_noise_std < 0.0)
    throw std::invalid_argument("TrainConfig: noise parameters must be >= 0");
  if (max_episodes < 0) throw std::invalid_argument("TrainConfig: max_episodes must be >= 0");
  if (episode_length < 1)
    throw std::invalid_argument("TrainConfig: episode_length must be >= 1");
  if (warmup_steps < 0) throw std::invalid_argument("TrainConfig: warmup_steps must be >= 0");
  if (actor_delay_steps < 0)
    throw std::invalid_argument("TrainConfig: actor_delay_steps must be >= 0");
  if (buffer_capacity < static_cast<std::uint64_t>(batch_size))
    throw std::invalid_argument("TrainConfig: buffer_capacity below batch_size");
  if (eval_interval < 1 || eval_episodes < 1 || patience < 1)
    throw std::invalid_argument("TrainConfig: evaluation settings must be >= 1");
}

Td3Nets init_nets(const ModelConfig& cfg, std::uint64_t root_seed) {
  Td3Nets nets;
  RngStream actor_rng = derive_stream(root_seed, "init-actor");
  RngStream critic1_rng = derive_stream(root_seed, "init-critic1");
  RngStream critic2_rng = derive_stream(root_seed, "init-critic2");
  nets.actor = init_actor(cfg, actor_rng);
  nets.critic1 = init_critic(cfg, critic1_rng);
  nets.critic2 = init_critic(cfg, critic2_rng);
  nets.target_actor = nets.actor;
  nets.target_critic1 = nets.critic1;
  nets.target_critic2 = nets.critic2;
  return nets;
}

namespace {

void polyak_gcnn(GcnnParams& target, const GcnnParams& online, double tau) {
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v) {
      Mat& t = target.taps[l][v];
      const Mat& o = online.taps[l][v];
      for (size_t i = 0; i < t.a.size(); ++i) t.a[i] = tau * o.a[i] + (1.0 - tau) * t.a[i];
    }
}

void polyak_critic(CriticNet& target, const CriticNet& online, double tau) {
  polyak_gcnn(target.gcnn, online.gcnn, tau);
  for (size_t i = 0; i < target.readout_w.size(); ++i)
    target.readout_w[i] = tau * online.readout_w[i] + (1.0 - tau) * target.readout_w[i];
  target.readout_b = tau * online.readout_b + (1.0 - tau) * target.readout_b;
}

std::vector<Adam::View> gcnn_views(GcnnParams& params, const GcnnGrads& grads) {
  std::vector<Adam::View> views;
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v)
      views.push_back({params.taps[l][v].a.data(), grads.taps[l][v].a.data(),
                       params.taps[l][v].a.size()});
  return views;
}

std::vector<Adam::View> critic_views(CriticNet& net, const CriticGrads& grads) {
  std::vector<Adam::View> views = gcnn_views(net.gcnn, grads.gcnn);
  views.push_back({net.readout_w.data(), grads.readout_w.data(), net.readout_w.size()});
  views.push_back({&net.readout_b, &grads.readout_b, 1});
  return views;
}

}  // namespace

void polyak_update(Td3Nets& nets, double tau) {
  polyak_gcnn(nets.target_actor.gcnn, nets.actor.gcnn, tau);
  polyak_critic(nets.target_critic1, nets.critic1, tau);
  polyak_critic(nets.target_critic2, nets.critic2, tau);
}

Td3Trainer::Td3Trainer(TopologyConfig topo, EnvConfig env, WmmseConfig wmmse,
                       ModelConfig model, TrainConfig train, std::uint64_t root_seed)
    : topo_(topo),
      env_(env),
      wmmse_(wmmse),
      model_(model),
      train_(train),
      root_seed_(root_seed),
      nets_(init_nets(model, root_seed)),
      buffer_(train.buffer_capacity),
      actor_opt_(train.actor_lr, train.adam_beta1, train.adam_beta2, train.adam_eps),
      critic1_opt_(train.critic_lr, train.adam_beta1, train.adam_beta2, train.adam_eps),
      critic2_opt_(train.critic_lr, train.adam_beta1, train.adam_beta2, train.adam_eps),
      exploration_rng_(derive_stream(root_seed, "exploration")),
      sample_rng_(derive_stream(root_seed, "sample")),
      target_noise_rng_(derive_stream(root_seed, "target-noise")) {
  topo_.validate();
  env_.validate();
  wmmse_.validate();
  train_.validate();
}

CriticLosses Td3Trainer::critic_update(const std::vector<size_t>& indices) {
  const int batch = static_cast<int>(indices.size());
  const int m = topo_.m;

  // Target smoothing noise drawn up front so the parallel loop below cannot
  // perturb the stream order.
  std::vector<Vec> noise(batch, Vec(m, 0.0));
  for (int k = 0; k < batch; ++k)
    for (int i = 0; i < m; ++i)
      noise[k][i] = std::clamp(target_noise_rng_.normal(0.0, train_.target_noise_std),
                               -train_.target_noise_clip, train_.target_noise_clip);

  std::vector<CriticGrads> grads1(batch), grads2(batch);
  Vec sq_err1(batch, 0.0), sq_err2(batch, 0.0);

#pragma omp parallel for schedule(static) if (train_.parallel)
  for (int k = 0; k < batch; ++k) {
    const Transition& tr = buffer_[indices[k]];

    double y = tr.reward;
    if (!tr.terminal) {
      const GraphPowers next_powers = make_powers(tr.next_channel, model_.normalize_powers);
      const BatteryState next_b{tr.next_battery};
      Vec next_scale = actor_scales(nets_.target_actor, next_powers,
                                    actor_features(next_b, model_, env_));
      for (int i = 0; i < m; ++i)
        next_scale[i] = std::clamp(next_scale[i] + noise[k][i], 0.0, 1.0);
      const Mat next_feat = critic_features(next_b, next_scale, model_, env_);
      const double q1 = critic_value(nets_.target_critic1, next_powers, next_feat);
      const double q2 = critic_value(nets_.target_critic2, next_powers, next_feat);
      y += env_.gamma * std::min(q1, q2);
    }

    const GraphPowers powers = make_powers(tr.channel, model_.normalize_powers);
    const Mat feat = critic_features(BatteryState{tr.battery}, tr.action_scale, model_, env_);

    GcnnCache cache1, cache2;
    const double v1 = critic_value(nets_.critic1, powers, feat, &cache1);
    const double v2 = critic_value(nets_.critic2, powers, feat, &cache2);
    const double e1 = v1 - y;
    const double e2 = v2 - y;
    sq_err1[k] = e1 * e1;
    sq_err2[k] = e2 * e2;
    critic_backward(nets_.critic1, powers, cache1, 2.0 * e1 / batch, &grads1[k]);
    critic_backward(nets_.critic2, powers, cache2, 2.0 * e2 / batch, &grads2[k]);
  }

  // Index-ordered reduction keeps the sums bit-identical across thread counts.
  CriticGrads total1, total2;
  total1.init_like(nets_.critic1);
  total2.init_like(nets_.critic2);
  CriticLosses losses;
  for (int k = 0; k < batch; ++k) {
    total1.add(grads1[k]);
    total2.add(grads2[k]);
    losses.critic1 += sq_err1[k];
    losses.critic2 += sq_err2[k];
  }
  losses.critic1 /= batch;
  losses.critic2 /= batch;
  if (!std::isfinite(losses.critic1) || !std::isfinite(losses.critic2))
    throw TrainingDivergence("non-finite critic loss", critic_updates_);

  critic1_opt_.step(critic_views(nets_.critic1, total1));
  critic2_opt_.step(critic_views(nets_.critic2, total2));
  ++critic_updates_;
  last_critic_losses_ = losses;
  return losses;
}

double Td3Trainer::actor_update(const std::vector<size_t>& indices) {
  const int batch = static_cast<int>(indices.size());

  std::vector<GcnnGrads> grads(batch);
  Vec q_vals(batch, 0.0);

#pragma omp parallel for schedule(static) if (train_.parallel)
  for (int k = 0; k < batch; ++k) {
    const Transition& tr = buffer_[indices[k]];
    const GraphPowers powers = make_powers(tr.channel, model_.normalize_powers);
    const BatteryState b{tr.battery};

    GcnnCache actor_cache;
    const Vec scale =
        actor_scales(nets_.actor, powers, actor_features(b, model_, env_), &actor_cache);

    GcnnCache critic_cache;
    const Mat feat = critic_features(b, scale, model_, env_);
    q_vals[k] = critic_value(nets_.critic1, powers, feat, &critic_cache);

    // Gradient ascent on Q1: upstream -1/batch through the critic, then only
    // the action column feeds the actor.
    CriticGrads critic_scratch;
    Mat dfeat;
    critic_backward(nets_.critic1, powers, critic_cache, -1.0 / batch, &critic_scratch,
                    &dfeat);
    Mat dscale(dfeat.rows, 1);
    for (int i = 0; i < dfeat.rows; ++i) dscale(i, 0) = dfeat(i, 1);
    gcnn_backward(powers, nets_.actor.gcnn, actor_cache, OutputNonlinearity::Sigmoid, dscale,
                  &grads[k]);
  }

  GcnnGrads total;
  total.init_like(nets_.actor.gcnn);
  double loss = 0.0;
  for (int k = 0; k < batch; ++k) {
    total.add(grads[k]);
    loss -= q_vals[k];
  }
  loss /= batch;
  if (!std::isfinite(loss)) throw TrainingDivergence("non-finite actor loss", critic_updates_);

  actor_opt_.step(gcnn_views(nets_.actor.gcnn, total));
  polyak_update(nets_, train_.polyak_tau);
  last_actor_loss_ = loss;
  return loss;
}

EvalRecord Td3Trainer::evaluate(int episode_index) {
  const int n = train_.eval_episodes;
  std::vector<double> sums(n, 0.0);
  std::vector<int> violations(n, 0);

#pragma omp parallel for schedule(dynamic) if (train_.parallel)
  for (int e = 0; e < n; ++e) {
    RngStream topo_rng = derive_stream(root_seed_, "heldout-topology", e);
    RngStream fading_rng = derive_stream(root_seed_, "heldout-fading", e);
    RngStream battery_rng = derive_stream(root_seed_, "heldout-battery", e);
    EnvConfig env = env_;
    env.horizon = train_.episode_length;
    const Episode ep = sample_episode(topo_, train_.episode_length, topo_rng, fading_rng);
    const BatteryState b0 = sample_initial_battery(env, topo_.m, battery_rng);
    const RolloutResult run = run_nmpa(ep, b0, nets_.actor, model_, env, wmmse_);
    sums[e] = run.episodic_sum_rate;
    violations[e] = run.violation_events;
  }

  EvalRecord rec;
  rec.episode = episode_index;
  long long viol = 0;
  for (int e = 0; e < n; ++e) {
    rec.mean_episodic_sum_rate += sums[e];
    viol += violations[e];
  }
  rec.mean_episodic_sum_rate /= n;
  rec.mean_violations_per_tx = static_cast<double>(viol) / (static_cast<double>(topo_.m) * n);
  rec.mean_episodic_return =
      rec.mean_episodic_sum_rate - env_.penalty * static_cast<double>(viol) / n;
  rec.critic1_loss = last_critic_losses_.critic1;
  rec.critic2_loss = last_critic_losses_.critic2;
  rec.actor_loss = last_actor_loss_;
  return rec;
}

void Td3Trainer::rollout_episode(int episode_index, TrainReport& report) {
  RngStream topo_rng = derive_stream(root_seed_, "topology", episode_index);
  RngStream fading_rng = derive_stream(root_seed_, "fading", episode_index);
  RngStream battery_rng = derive_stream(root_seed_, "battery", episode_index);

  EnvConfig env_cfg = env_;
  env_cfg.horizon = train_.episode_length;
  Episode episode = sample_episode(topo_, train_.episode_length, topo_rng, fading_rng);
  const std::vector<Vec> p_bars = train_.parallel
                                      ? wmmse_solve_batch(episode.steps, wmmse_)
                                      : wmmse_solve_batch_serial(episode.steps, wmmse_);
  BatteryState b0 = sample_initial_battery(env_cfg, topo_.m, battery_rng);
  BatteryEnv env(env_cfg, std::move(episode), std::move(b0));

  const int T = train_.episode_length;
  const int m = topo_.m;
  for (int t = 0; t < T; ++t) {
    const BatteryState before = env.battery();
    const ChannelMatrix& ch = env.current_channel();

    Vec scale(m);
    Vec p(m);
    if (env_steps_ < train_.warmup_steps) {
      for (int i = 0; i < m; ++i) scale[i] = exploration_rng_.uniform();
      for (int i = 0; i < m; ++i) p[i] = scale[i] * p_bars[t][i];
    } else {
      const GraphPowers powers = make_powers(ch, model_.normalize_powers);
      p = act_explore(nets_.actor, powers, before, p_bars[t], model_, env_cfg,
                      train_.explore_noise_std, exploration_rng_, &scale);
    }

    const StepOutcome out = env.step(p);

    Transition tr;
    tr.battery = before.levels;
    tr.channel = ch;
    tr.p_bar = p_bars[t];
    tr.action_scale = scale;
    tr.reward = out.reward;
    tr.terminal = out.terminal;
    if (!out.terminal) {
      tr.next_battery = out.next_battery.levels;
      tr.next_channel = env.current_channel();
      tr.next_p_bar = p_bars[t + 1];
    }
    buffer_.push(std::move(tr));
    ++env_steps_;

    if (env_steps_ > train_.warmup_steps &&
        buffer_.size() >= static_cast<size_t>(train_.batch_size)) {
      const std::vector<size_t> idx = buffer_.sample_indices(train_.batch_size, sample_rng_);
      critic_update(idx);
      ++report.updates;
      if (critic_updates_ % train_.policy_delay == 0) {
        if (env_steps_ > train_.actor_delay_steps)
          actor_update(idx);
        else
          polyak_update(nets_, train_.polyak_tau);
      }
    }
  }
  report.env_steps = env_steps_;
}

void Td3Trainer::resume_from(const Td3Nets& nets, int episode) {
  nets_ = nets;
  start_episode_ = episode;
  env_steps_ = static_cast<long long>(episode) * train_.episode_length;
}

TrainReport Td3Trainer::train(const TrainHooks& hooks) {
  TrainReport report;
  std::optional<Td3Nets> best;
  int evals_since_best = 0;

  for (int ep = start_episode_; ep < train_.max_episodes; ++ep) {
    rollout_episode(ep, report);
    report.episodes_run = ep + 1;

    if ((ep + 1) % train_.eval_interval == 0) {
      EvalRecord rec = evaluate(ep + 1);
      const bool improved = !best || rec.mean_episodic_return > report.best_eval;
      rec.improved = improved;
      if (improved) {
        report.best_eval = rec.mean_episodic_return;
        report.best_episode = ep + 1;
        best = nets_;
        evals_since_best = 0;
      } else {
        ++evals_since_best;
      }
      report.records.push_back(rec);
      if (hooks.on_eval) hooks.on_eval(nets_, rec, improved);
      if (evals_since_best >= train_.patience) {
        report.early_stopped = true;
        break;
      }
    }
  }

  if (best) nets_ = *best;
  return report;
}

namespace {
nlohmann::json nets_to_json(const Td3Nets& nets) {
  return {{"actor", actor_to_json(nets.actor)},
          {"critic1", critic_to_json(nets.critic1)},
          {"critic2", critic_to_json(nets.critic2)},
          {"target_actor", actor_to_json(nets.target_actor)},
          {"target_critic1", critic_to_json(nets.target_critic1)},
          {"target_critic2", critic_to_json(nets.target_critic2)}};
}

Td3Nets nets_from_json(const nlohmann::json& j) {
  Td3Nets nets;
  nets.actor = actor_from_json(j.at("actor"));
  nets.critic1 = critic_from_json(j.at("critic1"));
  nets.critic2 = critic_from_json(j.at("critic2"));
  nets.target_actor = actor_from_json(j.at("target_actor"));
  nets.target_critic1 = critic_from_json(j.at("target_critic1"));
  nets.target_critic2 = critic_from_json(j.at("target_critic2"));
  return nets;
}
}  // namespace

Td3Nets checkpoint_nets_from_json(const nlohmann::json& j) {
  return nets_from_json(j.at("nets"));
}

nlohmann::json checkpoint_to_json(const Td3Nets& nets, const CheckpointManifest& manifest) {
  nlohmann::json j;
  j["format"] = "nmpa-checkpoint-v1";
  j["config_hash"] = manifest.config_hash;
  j["episode"] = manifest.episode;
  j["nets"] = nets_to_json(nets);
  return j;
}

void save_checkpoint(const std::string& path, const Td3Nets& nets,
                     const CheckpointManifest& manifest) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os << checkpoint_to_json(nets, manifest).dump();
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
  nlohmann::json j;
  is >> j;
  if (j.value("format", "") != "nmpa-checkpoint-v1")
    throw std::runtime_error("unrecognized checkpoint format: " + path);
  LoadedCheckpoint out;
  out.nets = nets_from_json(j.at("nets"));
  out.manifest.config_hash = j.value("config_hash", "");
  out.manifest.episode = j.value("episode", 0);
  return out;
}

void write_report_jsonl(std::ostream& os, const TrainReport& report) {
  for (const EvalRecord& rec : report.records) {
    nlohmann::json j;
    j["episode"] = rec.episode;
    j["mean_episodic_sum_rate"] = rec.mean_episodic_sum_rate;
    j["mean_violations_per_tx"] = rec.mean_violations_per_tx;
    j["mean_episodic_return"] = rec.mean_episodic_return;
    j["critic1_loss"] = rec.critic1_loss;
    j["critic2_loss"] = rec.critic2_loss;
    j["actor_loss"] = rec.actor_loss;
    j["improved"] = rec.improved;
    os << j.dump() << '\n';
  }
}

}  // namespace nmpa
