#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "nmpa/channel.hpp"
#include "nmpa/rng.hpp"

namespace nmpa {

struct EnvConfig {
  double p_max = 1.0;          // per-transmitter instantaneous power cap
  double b_max = 20.0;         // max initial battery
  double alpha = 0.5;          // fixed cost charged per transmission
  double penalty = 1.0;        // violation penalty weight (L)
  double sigma_n = 1e-2;       // channel noise std; sigma_n^2 enters the SINR
  double gamma = 0.99;         // discount factor
  int horizon = 100;           // episode length T
  double tx_threshold = 1e-3;  // minimum power counted as a transmission

  void validate() const {
    if (p_max <= 0.0) throw std::invalid_argument("EnvConfig: p_max must be > 0");
    if (b_max < 2.0 * p_max)
      throw std::invalid_argument("EnvConfig: b_max must be >= 2 * p_max");
    if (alpha < 0.0) throw std::invalid_argument("EnvConfig: alpha must be >= 0");
    if (penalty < 0.0) throw std::invalid_argument("EnvConfig: penalty must be >= 0");
    if (sigma_n <= 0.0) throw std::invalid_argument("EnvConfig: sigma_n must be > 0");
    if (gamma <= 0.0 || gamma > 1.0)
      throw std::invalid_argument("EnvConfig: gamma must be in (0, 1]");
    if (horizon < 1) throw std::invalid_argument("EnvConfig: horizon must be >= 1");
    if (tx_threshold < 0.0)
      throw std::invalid_argument("EnvConfig: tx_threshold must be >= 0");
  }
};

struct BatteryState {
  Vec levels;

  int size() const { return static_cast<int>(levels.size()); }
};

struct PowerAllocation {
  Vec allocated;    // what the policy asked for, in [0, p_max]
  Vec transmitted;  // min(allocated, [battery - alpha]_+)
};

struct StepOutcome {
  double reward = 0.0;
  double sum_rate = 0.0;
  int violations = 0;
  BatteryState next_battery;
  PowerAllocation power;
  bool terminal = false;
};

// Initial budgets drawn i.i.d. from Uniform[b_max / 2, b_max].
BatteryState sample_initial_battery(const EnvConfig& cfg, int m, RngStream& rng);

// Per-link rates log2(1 + SINR) under allocation p.
Vec rate_per_link(const Vec& p, const ChannelMatrix& ch, double sigma_n);
double sum_rate(const Vec& p, const ChannelMatrix& ch, double sigma_n);

// One transition of the battery dynamics plus the composite reward.
// `is_last` marks t == T. Throws if p leaves the [0, p_max] box.
StepOutcome apply_step(const BatteryState& battery, const ChannelMatrix& ch, const Vec& p,
                       const EnvConfig& cfg, bool is_last);

// Single-threaded state machine over one episode.
class BatteryEnv {
 public:
  BatteryEnv(EnvConfig cfg, Episode episode, BatteryState b0);

  const EnvConfig& config() const { return cfg_; }
  const Episode& episode() const { return episode_; }
  const BatteryState& battery() const { return battery_; }
  int t() const { return t_; }
  bool done() const { return t_ >= episode_.length(); }

  // CSI for the upcoming step (time t + 1).
  const ChannelMatrix& current_channel() const;

  StepOutcome step(const Vec& allocated);
  void reset(Episode episode, BatteryState b0);

 private:
  EnvConfig cfg_;
  Episode episode_;
  BatteryState battery_;
  int t_ = 0;
};

// One rollout row per step: t, batteries before the step, allocated and
// transmitted powers, step sum-rate, violation count.
struct StepTraceRow {
  int t = 0;
  Vec battery_before;
  Vec allocated;
  Vec transmitted;
  double sum_rate = 0.0;
  int violations = 0;
};

void write_trace_csv(std::ostream& os, const std::vector<StepTraceRow>& rows);

}  // namespace nmpa
