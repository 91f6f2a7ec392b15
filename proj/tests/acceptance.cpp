// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1-3 train a policy on the benchmark configuration first;
// set NMPA_ACCEPTANCE_CHECKPOINT to reuse a saved policy instead of training.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nmpa/config.hpp"
#include "nmpa/gradcheck.hpp"
#include "nmpa/td3.hpp"

using namespace nmpa;
using testing_oracles::grid_search_best_m2;
using testing_oracles::random_dense_channel;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail
            << std::endl;
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig benchmark_config() {
  RunConfig cfg;  // defaults carry the benchmark: M=10, S=60, R=20, mixed
                  // topologies, P_max=1, B_max=20, alpha=0.5, L=1, T=100,
                  // budgets U[10,20]
  cfg.seed = 2024;
  cfg.train.max_episodes = 1500;
  cfg.train.eval_interval = 50;
  cfg.train.eval_episodes = 5;
  cfg.train.patience = 12;
  return cfg;
}

// Criteria 1-2: paired NMPA/MPA benchmark on 10 held-out episodes.
void run_benchmark_criteria(const RunConfig& cfg, const ActorNet& actor) {
  const CompareReport rep = compare(cfg.topology, cfg.env, cfg.wmmse(), cfg.model, actor, 10,
                                    100, cfg.seed, "acceptance-eval");
  {
    std::ostringstream os;
    os << "NMPA-vs-MPA mean improvement " << 100.0 * rep.mean_improvement
       << "% (threshold >= 10%); nmpa " << rep.nmpa_mean << ", mpa " << rep.mpa_mean;
    report(1, rep.mean_improvement >= 0.10, os.str());
  }
  {
    std::ostringstream os;
    os << "NMPA violations per transmitter per episode " << rep.nmpa_violations_per_tx
       << " (threshold <= 0.01)";
    report(2, rep.nmpa_violations_per_tx <= 0.01, os.str());
  }
}

// Criterion 3: generalization across inference lengths with the T=100 policy.
void run_generalization_criterion(const RunConfig& cfg, const ActorNet& actor) {
  const std::vector<int> lengths{30, 60, 150};
  const auto rows = sweep_lengths(cfg.topology, cfg.env, cfg.wmmse(), cfg.model, actor,
                                  lengths, 10, cfg.seed);
  bool pass = true;
  std::ostringstream os;
  os << "NMPA vs MPA mean episodic sum-rate by length:";
  for (const SweepRow& r : rows) {
    pass = pass && r.nmpa_mean >= r.mpa_mean;
    os << " [T=" << r.length << ": " << r.nmpa_mean << " vs " << r.mpa_mean << "]";
  }
  report(3, pass, os.str());
}

// Criterion 4: solver near-optimality against the exhaustive grid oracle.
void run_wmmse_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  WmmseConfig cfg;
  cfg.sigma_n = 1.0;
  RngStream rng = derive_stream(4242, "acceptance-wmmse");
  double worst = 1.0;
  for (int k = 0; k < 100; ++k) {
    const ChannelMatrix ch = random_dense_channel(2, rng, 0.3, 1.5, 1.2);
    const double achieved = sum_rate_of(ch, wmmse_solve(ch, cfg), cfg.sigma_n);
    const double optimum = grid_search_best_m2(ch, cfg.p_max, cfg.sigma_n, 101);
    if (optimum > 0.0) worst = std::min(worst, achieved / optimum);
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << "WMMSE/grid-optimum worst ratio " << worst << " over 100 instances (threshold >= 0.95), "
     << elapsed << "s (< 10s)";
  report(4, worst >= 0.95 && elapsed < 10.0, os.str());
}

// Criterion 5: gradient correctness via central finite differences.
void run_gradcheck_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const GradCheckResult res = run_gradcheck(50, {2, 3, 5}, 99, 32, 1e-5);
  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << "max relative gradient error " << res.max_rel_error << " over " << res.coordinates
     << " coordinates (threshold < 1e-4), " << elapsed << "s (< 30s)";
  report(5, res.max_rel_error < 1e-4 && elapsed < 30.0, os.str());
}

// Criterion 6: constraint satisfaction by construction, zero tolerance.
void run_constraint_criterion() {
  RngStream rng = derive_stream(606, "acceptance-constraints");
  EnvConfig env;
  env.sigma_n = 0.01;
  ModelConfig model;
  TopologyConfig topo{10, 60.0, 20.0, TopologyMode::Mixed};
  WmmseConfig wmmse;
  wmmse.sigma_n = env.sigma_n;

  bool pass = true;
  int states = 0;
  // 500 rollouts of 20 steps = 1e4 random states under random parameters.
  for (int trial = 0; trial < 500 && pass; ++trial) {
    RngStream prng = derive_stream(607, "acceptance-params", trial);
    ActorNet actor;
    actor.gcnn = init_gcnn(1, model.hidden, 1, prng, 0.01, 1.0);
    RngStream t = derive_stream(608, "topo", trial), f = derive_stream(608, "fading", trial);
    RngStream br = derive_stream(608, "battery", trial);
    EnvConfig env20 = env;
    env20.horizon = 20;
    Episode ep = sample_episode(topo, 20, t, f);
    const std::vector<Vec> p_bars = wmmse_solve_batch_serial(ep.steps, wmmse);
    BatteryState b0 = sample_initial_battery(env20, topo.m, br);
    BatteryEnv sim(env20, std::move(ep), std::move(b0));
    Vec prev = sim.battery().levels;
    for (int step = 0; step < 20; ++step) {
      const GraphPowers powers = make_powers(sim.current_channel(), model.normalize_powers);
      const Vec p = act(actor, powers, sim.battery(), p_bars[step], model, env20);
      for (int i = 0; i < topo.m; ++i)
        pass = pass && p[i] >= 0.0 && p[i] <= env20.p_max;
      const StepOutcome out = sim.step(p);
      for (int i = 0; i < topo.m; ++i)
        pass = pass && out.next_battery.levels[i] >= 0.0 &&
               out.next_battery.levels[i] <= prev[i];
      prev = out.next_battery.levels;
      ++states;
    }
  }
  std::ostringstream os;
  os << "allocations in [0, P_max] and batteries non-increasing, nonnegative over " << states
     << " random states (zero tolerance)";
  report(6, pass && states == 10000, os.str());
}

// Criterion 7: permutation equivariance / invariance on 100 instances.
void run_permutation_criterion() {
  RngStream rng = derive_stream(707, "acceptance-perm");
  ModelConfig model;
  EnvConfig env;
  bool pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 10;
    RngStream prng = derive_stream(708, "nets", trial);
    ActorNet actor;
    actor.gcnn = init_gcnn(1, model.hidden, 1, prng, 0.01, 1.0);
    CriticNet critic = init_critic(model, prng);

    const ChannelMatrix ch = random_dense_channel(m, rng);
    BatteryState b;
    b.levels.resize(m);
    for (double& bi : b.levels) bi = rng.uniform(0.0, env.b_max);
    Vec action(m);
    for (double& a : action) a = rng.uniform();

    // Random permutation via partial shuffle.
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    for (int i = m - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);

    ChannelMatrix chp;
    chp.m = m;
    chp.entries = Mat(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) chp.entries(perm[i], perm[j]) = ch(i, j);
    BatteryState bp;
    bp.levels.resize(m);
    Vec actionp(m);
    for (int i = 0; i < m; ++i) {
      bp.levels[perm[i]] = b.levels[i];
      actionp[perm[i]] = action[i];
    }

    const Vec s = actor_scales(actor, make_powers(ch), actor_features(b, model, env));
    const Vec sp = actor_scales(actor, make_powers(chp), actor_features(bp, model, env));
    for (int i = 0; i < m; ++i) worst = std::max(worst, std::abs(sp[perm[i]] - s[i]));

    const double q =
        critic_value(critic, make_powers(ch), critic_features(b, action, model, env));
    const double qp =
        critic_value(critic, make_powers(chp), critic_features(bp, actionp, model, env));
    worst = std::max(worst, std::abs(qp - q) / std::max(1.0, std::abs(q)));
  }
  pass = worst < 1e-12;
  std::ostringstream os;
  os << "actor equivariance and critic invariance worst deviation " << worst
     << " over 100 permuted instances (threshold < 1e-12)";
  report(7, pass, os.str());
}

// Criterion 8: myopic equivalence under a never-binding battery.
void run_myopic_equivalence_criterion() {
  RunConfig cfg = benchmark_config();
  cfg.env.b_max = 1e4;  // budgets U[5000, 10000] never bind over T=100
  cfg.env.penalty = 0.0;
  double worst = 0.0;
  for (int e = 0; e < 3; ++e) {
    RngStream t = derive_stream(808, "topo", e), f = derive_stream(808, "fading", e);
    RngStream br = derive_stream(808, "battery", e);
    const Episode ep = sample_episode(cfg.topology, 100, t, f);
    const BatteryState b0 = sample_initial_battery(cfg.env, cfg.topology.m, br);
    const RolloutResult run = run_mpa(ep, b0, cfg.env, cfg.wmmse());
    double expected = 0.0;
    for (const ChannelMatrix& ch : ep.steps)
      expected += sum_rate_of(ch, wmmse_solve(ch, cfg.wmmse()), cfg.env.sigma_n);
    worst = std::max(worst, std::abs(run.episodic_sum_rate - expected) / expected);
  }
  std::ostringstream os;
  os << "MPA episodic sum-rate vs per-step solver benchmark, worst relative error " << worst
     << " (threshold <= 1e-9)";
  report(8, worst <= 1e-9, os.str());
}

ActorNet obtain_policy(const RunConfig& cfg) {
  if (const char* path = std::getenv("NMPA_ACCEPTANCE_CHECKPOINT")) {
    std::cout << "loading policy from " << path << std::endl;
    return load_checkpoint(path).nets.actor;
  }
  RunConfig train_cfg = cfg;
  if (const char* eps = std::getenv("NMPA_ACCEPTANCE_EPISODES"))
    train_cfg.train.max_episodes = std::atoi(eps);
  std::cout << "training benchmark policy (" << train_cfg.train.max_episodes
            << " episodes max, early stopping)..." << std::endl;
  const auto t0 = std::chrono::steady_clock::now();
  Td3Trainer trainer(train_cfg.topology, train_cfg.env, train_cfg.wmmse(), train_cfg.model,
                     train_cfg.train, train_cfg.seed);
  TrainHooks hooks;
  hooks.on_eval = [&](const Td3Nets&, const EvalRecord& rec, bool best) {
    std::cout << "  episode " << rec.episode << ": eval sum-rate "
              << rec.mean_episodic_sum_rate << ", violations/tx " << rec.mean_violations_per_tx
              << (best ? " (best)" : "") << std::endl;
  };
  const TrainReport report = trainer.train(hooks);
  std::cout << "trained " << report.episodes_run << " episodes ("
            << seconds_since(t0) << "s), best eval " << report.best_eval << " at episode "
            << report.best_episode << std::endl;
  if (const char* save = std::getenv("NMPA_ACCEPTANCE_SAVE"))
    save_checkpoint(save, trainer.nets(), {config_hash(cfg), report.best_episode});
  return trainer.nets().actor;
}

}  // namespace

int main() {
  const RunConfig cfg = benchmark_config();

  // Fast criteria first so a broken build fails quickly.
  run_wmmse_criterion();
  run_gradcheck_criterion();
  run_constraint_criterion();
  run_permutation_criterion();
  run_myopic_equivalence_criterion();

  const ActorNet actor = obtain_policy(cfg);
  run_benchmark_criteria(cfg, actor);
  run_generalization_criterion(cfg, actor);

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " (" << failures
            << " failure(s))" << std::endl;
  return failures == 0 ? 0 : 1;
}
