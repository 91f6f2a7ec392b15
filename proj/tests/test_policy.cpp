#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "nmpa/policy.hpp"

using namespace nmpa;
using namespace testing_oracles;

namespace {
ModelConfig small_model() {
  ModelConfig m;
  m.hidden = 8;
  m.critic_channels = 8;
  return m;
}

EnvConfig default_env() {
  EnvConfig e;
  return e;
}

ActorNet zero_actor(int hidden) {
  ActorNet a;
  a.gcnn.f_in = 1;
  a.gcnn.hidden = hidden;
  a.gcnn.f_out = 1;
  a.gcnn.taps[0] = {Mat(1, hidden), Mat(1, hidden), Mat(1, hidden)};
  a.gcnn.taps[1] = {Mat(hidden, 1), Mat(hidden, 1), Mat(hidden, 1)};
  return a;
}

ChannelMatrix permute_channel(const ChannelMatrix& ch, const std::vector<int>& perm) {
  ChannelMatrix out;
  out.m = ch.m;
  out.entries = Mat(ch.m, ch.m);
  for (int i = 0; i < ch.m; ++i)
    for (int j = 0; j < ch.m; ++j) out.entries(perm[i], perm[j]) = ch(i, j);
  return out;
}

template <typename T>
std::vector<T> permute(const std::vector<T>& v, const std::vector<int>& perm) {
  std::vector<T> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[perm[i]] = v[i];
  return out;
}
}  // namespace

TEST_CASE("zero-initialized actor halves the lower-level allocation") {
  RngStream rng(1);
  const ChannelMatrix ch = random_dense_channel(4, rng);
  const ActorNet actor = zero_actor(8);
  const BatteryState b{{12.0, 15.0, 18.0, 10.0}};
  const Vec p_bar{1.0, 0.5, 0.0, 0.8};
  const Vec p = act(actor, make_powers(ch), b, p_bar, small_model(), default_env());
  for (size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(0.5 * p_bar[i]));
}

TEST_CASE("zero lower-level allocation forces zero power") {
  RngStream rng(2), prng(3);
  const ChannelMatrix ch = random_dense_channel(3, rng);
  ActorNet actor;
  actor.gcnn = init_gcnn(1, 8, 1, prng);
  const BatteryState b{{20.0, 1.0, 7.0}};
  const Vec p = act(actor, make_powers(ch), b, Vec{0.0, 0.0, 0.0}, small_model(), default_env());
  for (double pi : p) CHECK(pi == 0.0);
}

TEST_CASE("allocations never leave the box for random actors and states") {
  RngStream rng(4);
  const EnvConfig env = default_env();
  const ModelConfig model = small_model();
  for (int trial = 0; trial < 200; ++trial) {
    RngStream prng(trial);
    ActorNet actor;
    actor.gcnn = init_gcnn(1, model.hidden, 1, prng, 0.01, 1.0);
    const int m = 2 + static_cast<int>(rng.below(6));
    const ChannelMatrix ch = random_dense_channel(m, rng);
    BatteryState b;
    b.levels.resize(m);
    for (double& bi : b.levels) bi = rng.uniform(0.0, env.b_max);
    Vec p_bar(m);
    for (double& pi : p_bar) pi = rng.uniform(0.0, env.p_max);
    const Vec p = act(actor, make_powers(ch), b, p_bar, model, env);
    for (int i = 0; i < m; ++i) {
      CHECK(p[i] >= 0.0);
      CHECK(p[i] <= env.p_max);
      CHECK(p[i] <= p_bar[i]);
    }
  }
}

TEST_CASE("exploration with zero noise equals the deterministic action") {
  RngStream rng(5), prng(6), noise(7);
  const ChannelMatrix ch = random_dense_channel(5, rng);
  ActorNet actor;
  actor.gcnn = init_gcnn(1, 8, 1, prng);
  const BatteryState b{{10, 11, 12, 13, 14}};
  const Vec p_bar{1.0, 0.9, 0.8, 0.7, 0.6};
  const GraphPowers powers = make_powers(ch);
  const ModelConfig model = small_model();
  const EnvConfig env = default_env();
  const Vec det = act(actor, powers, b, p_bar, model, env);
  const Vec expl = act_explore(actor, powers, b, p_bar, model, env, 0.0, noise);
  CHECK(det == expl);
}

TEST_CASE("exploration noise stays clipped to [0,1] scales") {
  RngStream rng(8), prng(9), noise(10);
  const ChannelMatrix ch = random_dense_channel(4, rng);
  ActorNet actor;
  actor.gcnn = init_gcnn(1, 8, 1, prng);
  const BatteryState b{{10, 11, 12, 13}};
  const Vec p_bar{1.0, 1.0, 1.0, 1.0};
  const GraphPowers powers = make_powers(ch);
  for (int k = 0; k < 100; ++k) {
    Vec scale;
    act_explore(actor, powers, b, p_bar, small_model(), default_env(), 5.0, noise, &scale);
    for (double s : scale) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("exploration trajectories replay under a fixed seed") {
  RngStream rng(11), prng(12);
  const ChannelMatrix ch = random_dense_channel(4, rng);
  ActorNet actor;
  actor.gcnn = init_gcnn(1, 8, 1, prng);
  const BatteryState b{{10, 11, 12, 13}};
  const Vec p_bar{1.0, 1.0, 1.0, 1.0};
  const GraphPowers powers = make_powers(ch);
  RngStream n1 = derive_stream(3, "exploration"), n2 = derive_stream(3, "exploration");
  for (int k = 0; k < 20; ++k) {
    const Vec a = act_explore(actor, powers, b, p_bar, small_model(), default_env(), 0.3, n1);
    const Vec bb = act_explore(actor, powers, b, p_bar, small_model(), default_env(), 0.3, n2);
    CHECK(a == bb);
  }
}

TEST_CASE("zero-initialized critic outputs its readout bias") {
  RngStream rng(13);
  const ChannelMatrix ch = random_dense_channel(4, rng);
  CriticNet critic;
  critic.gcnn.f_in = 2;
  critic.gcnn.hidden = 8;
  critic.gcnn.f_out = 8;
  critic.gcnn.taps[0] = {Mat(2, 8), Mat(2, 8), Mat(2, 8)};
  critic.gcnn.taps[1] = {Mat(8, 8), Mat(8, 8), Mat(8, 8)};
  critic.readout_w.assign(8, 0.7);
  critic.readout_b = -1.25;
  const Mat feat = critic_features(BatteryState{{10, 11, 12, 13}}, {0.1, 0.2, 0.3, 0.4},
                                   small_model(), default_env());
  CHECK(critic_value(critic, make_powers(ch), feat) == doctest::Approx(-1.25));
}

TEST_CASE("critic is permutation invariant; actor is equivariant") {
  RngStream rng(14);
  const std::vector<int> perm{2, 4, 0, 1, 3};
  const ModelConfig model = small_model();
  const EnvConfig env = default_env();
  for (int trial = 0; trial < 100; ++trial) {
    RngStream prng = derive_stream(1000, "nets", trial);
    ActorNet actor;
    actor.gcnn = init_gcnn(1, model.hidden, 1, prng, 0.01, 1.0);
    CriticNet critic = init_critic(model, prng);

    const ChannelMatrix ch = random_dense_channel(5, rng);
    BatteryState b;
    b.levels.resize(5);
    for (double& bi : b.levels) bi = rng.uniform(0.0, env.b_max);
    Vec action(5);
    for (double& a : action) a = rng.uniform();

    const ChannelMatrix ch_p = permute_channel(ch, perm);
    const BatteryState b_p{permute(b.levels, perm)};
    const Vec action_p = permute(action, perm);

    const double q = critic_value(critic, make_powers(ch),
                                  critic_features(b, action, model, env));
    const double q_p = critic_value(critic, make_powers(ch_p),
                                    critic_features(b_p, action_p, model, env));
    CHECK(q_p == doctest::Approx(q).epsilon(1e-12));

    const Vec scales =
        actor_scales(actor, make_powers(ch), actor_features(b, model, env));
    const Vec scales_p =
        actor_scales(actor, make_powers(ch_p), actor_features(b_p, model, env));
    const Vec expected = permute(scales, perm);
    for (int i = 0; i < 5; ++i)
      CHECK(scales_p[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("critic action gradient matches finite differences") {
  RngStream rng(15), prng(16);
  const ModelConfig model = small_model();
  const EnvConfig env = default_env();
  const ChannelMatrix ch = random_dense_channel(4, rng);
  const GraphPowers powers = make_powers(ch);
  CriticNet critic = init_critic(model, prng);
  const BatteryState b{{2.0, 1.5, 0.8, 1.2}};
  Vec action{0.3, 0.6, 0.9, 0.1};

  GcnnCache cache;
  critic_value(critic, powers, critic_features(b, action, model, env), &cache);
  CriticGrads grads;
  Mat dfeat;
  critic_backward(critic, powers, cache, 1.0, &grads, &dfeat);

  const double h = 1e-5;
  for (int i = 0; i < 4; ++i) {
    Vec up = action, dn = action;
    up[i] += h;
    dn[i] -= h;
    const double qu = critic_value(critic, powers, critic_features(b, up, model, env));
    const double qd = critic_value(critic, powers, critic_features(b, dn, model, env));
    const double numeric = (qu - qd) / (2.0 * h);
    const double analytic = dfeat(i, 1);
    const double rel =
        std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("actor and critic JSON round-trips are bit-exact") {
  RngStream prng(17);
  ActorNet actor;
  actor.gcnn = init_gcnn(1, 8, 1, prng);
  const CriticNet critic = init_critic(small_model(), prng);
  const ActorNet actor2 =
      actor_from_json(nlohmann::json::parse(actor_to_json(actor).dump()));
  const CriticNet critic2 =
      critic_from_json(nlohmann::json::parse(critic_to_json(critic).dump()));
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v) {
      CHECK(actor2.gcnn.taps[l][v].a == actor.gcnn.taps[l][v].a);
      CHECK(critic2.gcnn.taps[l][v].a == critic.gcnn.taps[l][v].a);
    }
  CHECK(critic2.readout_w == critic.readout_w);
  CHECK(critic2.readout_b == critic.readout_b);
}
