#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nmpa/env.hpp"
#include "nmpa/policy.hpp"
#include "nmpa/wmmse.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nmpa {

// One (transmitter, step) sample for the scale/battery/rate analysis.
struct ScaleRecord {
  double battery = 0.0;          // available battery before the step
  double achievable_rate = 0.0;  // rate under the battery-agnostic allocation
  double scale = 0.0;
};

struct RolloutResult {
  std::vector<StepTraceRow> trace;
  double episodic_sum_rate = 0.0;
  int violation_events = 0;
  std::vector<ScaleRecord> scales;  // empty for the myopic baseline
};

// Myopic baseline: allocate the instantaneous solution at every step and let
// the environment clip it against the battery.
RolloutResult run_mpa(const Episode& episode, const BatteryState& b0, const EnvConfig& env,
                      const WmmseConfig& wmmse);

// Noise-free rollout of a trained scale policy.
RolloutResult run_nmpa(const Episode& episode, const BatteryState& b0, const ActorNet& actor,
                       const ModelConfig& model, const EnvConfig& env,
                       const WmmseConfig& wmmse);

struct EpisodePair {
  double nmpa_sum_rate = 0.0;
  double mpa_sum_rate = 0.0;
  int nmpa_violations = 0;
  int mpa_violations = 0;
  double improvement = 0.0;  // (nmpa - mpa) / mpa
};

struct CompareReport {
  int m = 0;
  int length = 0;
  std::vector<EpisodePair> episodes;
  double nmpa_mean = 0.0, nmpa_std = 0.0;
  double mpa_mean = 0.0, mpa_std = 0.0;
  double mean_improvement = 0.0, std_improvement = 0.0;
  // Violation events / (M * episodes).
  double nmpa_violations_per_tx = 0.0;
  double mpa_violations_per_tx = 0.0;
  std::vector<RolloutResult> nmpa_runs;
  std::vector<RolloutResult> mpa_runs;
};

// Paired evaluation: both policies see bit-identical episodes and budgets.
// Episodes are derived from (seed, stream_tag, index), so a fixed seed
// regenerates the exact same benchmark.
CompareReport compare(const TopologyConfig& topo, const EnvConfig& env,
                      const WmmseConfig& wmmse, const ModelConfig& model,
                      const ActorNet& actor, int n_episodes, int length,
                      std::uint64_t seed, const char* stream_tag = "eval",
                      bool parallel = true);

struct SweepRow {
  int length = 0;
  double nmpa_mean = 0.0, nmpa_std = 0.0;
  double mpa_mean = 0.0, mpa_std = 0.0;
  double mean_improvement = 0.0;
  int n_episodes = 0;
};

// Inference-length generalization sweep; the policy never sees the length.
std::vector<SweepRow> sweep_lengths(const TopologyConfig& topo, const EnvConfig& env,
                                    const WmmseConfig& wmmse, const ModelConfig& model,
                                    const ActorNet& actor, const std::vector<int>& lengths,
                                    int n_episodes, std::uint64_t seed, bool parallel = true);

struct ScaleHistogram {
  int bins = 20;
  double battery_max = 0.0;  // bin range [0, battery_max]
  double rate_max = 0.0;     // bin range [0, p99 of achievable rate]
  std::vector<long long> counts;  // bins x bins, row-major over (battery, rate)
  std::vector<double> mean_scale;  // meaningful only where counts > 0
  long long total = 0;
};

ScaleHistogram scale_histogram(const std::vector<RolloutResult>& nmpa_runs, double battery_max,
                               int bins = 20);

void write_cumulative_csv(std::ostream& os, const CompareReport& report);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_histogram_csv(std::ostream& os, const ScaleHistogram& hist);
nlohmann::json summary_json(const CompareReport& report, const std::vector<SweepRow>& sweep);

}  // namespace nmpa
