// Timing harness comparing the OpenMP batch kernels against their serial
// references: WMMSE batch solves, paired episode evaluation, and the TD3
// critic/actor batch updates.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <vector>

#include "nmpa/config.hpp"
#include "nmpa/td3.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace nmpa;

namespace {

double time_of(const std::function<void()>& fn, int repeats = 3) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::cout << std::left << std::setw(28) << name << std::right << std::fixed
            << std::setprecision(3) << std::setw(10) << serial * 1e3 << " ms" << std::setw(10)
            << parallel * 1e3 << " ms" << std::setw(9) << std::setprecision(2)
            << serial / parallel << "x\n";
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "built without OpenMP; parallel kernels run serially\n";
#endif
  std::cout << std::left << std::setw(28) << "kernel" << std::right << std::setw(13) << "serial"
            << std::setw(13) << "parallel" << std::setw(10) << "speedup\n";

  RunConfig cfg;
  cfg.seed = 5;

  // WMMSE over a batch of CSI matrices.
  {
    RngStream t = derive_stream(1, "topo"), f = derive_stream(1, "fading");
    const Episode ep = sample_episode(cfg.topology, 512, t, f);
    const WmmseConfig wcfg = cfg.wmmse();
    const double serial = time_of([&] { wmmse_solve_batch_serial(ep.steps, wcfg); });
    const double parallel = time_of([&] { wmmse_solve_batch(ep.steps, wcfg); });
    row("wmmse_solve x512", serial, parallel);
  }

  // Paired NMPA/MPA evaluation over independent episodes.
  {
    const ActorNet actor = init_nets(cfg.model, cfg.seed).actor;
    const double serial = time_of([&] {
      compare(cfg.topology, cfg.env, cfg.wmmse(), cfg.model, actor, 8, 50, 3, "bench", false);
    });
    const double parallel = time_of([&] {
      compare(cfg.topology, cfg.env, cfg.wmmse(), cfg.model, actor, 8, 50, 3, "bench", true);
    });
    row("paired eval x8 episodes", serial, parallel);
  }

  // TD3 batch updates: per-item gradients in parallel, ordered reduction.
  {
    RunConfig tcfg = cfg;
    tcfg.train.batch_size = 64;
    tcfg.train.warmup_steps = 0;

    auto fill = [&](Td3Trainer& trainer) {
      RngStream t = derive_stream(2, "topo"), f = derive_stream(2, "fading");
      RngStream br = derive_stream(2, "battery"), ar = derive_stream(2, "act");
      Episode ep = sample_episode(tcfg.topology, 100, t, f);
      const std::vector<Vec> p_bars = wmmse_solve_batch(ep.steps, tcfg.wmmse());
      BatteryState b0 = sample_initial_battery(tcfg.env, tcfg.topology.m, br);
      BatteryEnv env(tcfg.env, std::move(ep), std::move(b0));
      for (int step = 0; step < 100; ++step) {
        Transition tr;
        tr.battery = env.battery().levels;
        tr.channel = env.current_channel();
        tr.p_bar = p_bars[step];
        tr.action_scale.resize(tcfg.topology.m);
        for (double& a : tr.action_scale) a = ar.uniform();
        Vec p(tcfg.topology.m);
        for (int i = 0; i < tcfg.topology.m; ++i) p[i] = tr.action_scale[i] * tr.p_bar[i];
        const StepOutcome out = env.step(p);
        tr.reward = out.reward;
        tr.terminal = out.terminal;
        if (!out.terminal) {
          tr.next_battery = out.next_battery.levels;
          tr.next_channel = env.current_channel();
          tr.next_p_bar = p_bars[step + 1];
        }
        trainer.buffer().push(std::move(tr));
      }
    };

    std::vector<size_t> idx(64);
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    RunConfig serial_cfg = tcfg;
    serial_cfg.train.parallel = false;
    Td3Trainer serial_trainer(serial_cfg.topology, serial_cfg.env, serial_cfg.wmmse(),
                              serial_cfg.model, serial_cfg.train, serial_cfg.seed);
    fill(serial_trainer);
    Td3Trainer parallel_trainer(tcfg.topology, tcfg.env, tcfg.wmmse(), tcfg.model, tcfg.train,
                                tcfg.seed);
    fill(parallel_trainer);

    const double serial_c = time_of([&] {
      for (int r = 0; r < 20; ++r) serial_trainer.critic_update(idx);
    });
    const double parallel_c = time_of([&] {
      for (int r = 0; r < 20; ++r) parallel_trainer.critic_update(idx);
    });
    row("critic_update x20 (b=64)", serial_c, parallel_c);

    const double serial_a = time_of([&] {
      for (int r = 0; r < 20; ++r) serial_trainer.actor_update(idx);
    });
    const double parallel_a = time_of([&] {
      for (int r = 0; r < 20; ++r) parallel_trainer.actor_update(idx);
    });
    row("actor_update x20 (b=64)", serial_a, parallel_a);
  }

  return 0;
}
