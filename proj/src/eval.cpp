#include "nmpa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "nmpa/io.hpp"

namespace nmpa {

namespace {

StepTraceRow make_row(int t, const BatteryState& before, const StepOutcome& out) {
  StepTraceRow row;
  row.t = t;
  row.battery_before = before.levels;
  row.allocated = out.power.allocated;
  row.transmitted = out.power.transmitted;
  row.sum_rate = out.sum_rate;
  row.violations = out.violations;
  return row;
}

struct MeanStd {
  double mean = 0.0;
  double std_dev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty()) return ms;
  for (double x : xs) ms.mean += x;
  ms.mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
  ms.std_dev = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
  return ms;
}

}  // namespace

RolloutResult run_mpa(const Episode& episode, const BatteryState& b0, const EnvConfig& env,
                      const WmmseConfig& wmmse) {
  RolloutResult result;
  BatteryEnv sim(env, episode, b0);
  const std::vector<Vec> p_bars = wmmse_solve_batch_serial(episode.steps, wmmse);
  for (int t = 0; t < episode.length(); ++t) {
    const BatteryState before = sim.battery();
    const StepOutcome out = sim.step(p_bars[t]);
    result.trace.push_back(make_row(t + 1, before, out));
    result.episodic_sum_rate += out.sum_rate;
    result.violation_events += out.violations;
  }
  return result;
}

RolloutResult run_nmpa(const Episode& episode, const BatteryState& b0, const ActorNet& actor,
                       const ModelConfig& model, const EnvConfig& env,
                       const WmmseConfig& wmmse) {
  RolloutResult result;
  BatteryEnv sim(env, episode, b0);
  const std::vector<Vec> p_bars = wmmse_solve_batch_serial(episode.steps, wmmse);
  for (int t = 0; t < episode.length(); ++t) {
    const BatteryState before = sim.battery();
    const ChannelMatrix& ch = sim.current_channel();
    const GraphPowers powers = make_powers(ch, model.normalize_powers);
    const Vec scale =
        actor_scales(actor, powers, actor_features(before, model, env));
    Vec p(scale.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = scale[i] * p_bars[t][i];

    const Vec achievable = rate_per_link(p_bars[t], ch, env.sigma_n);
    for (size_t i = 0; i < scale.size(); ++i)
      result.scales.push_back({before.levels[i], achievable[i], scale[i]});

    const StepOutcome out = sim.step(p);
    result.trace.push_back(make_row(t + 1, before, out));
    result.episodic_sum_rate += out.sum_rate;
    result.violation_events += out.violations;
  }
  return result;
}

CompareReport compare(const TopologyConfig& topo, const EnvConfig& env,
                      const WmmseConfig& wmmse, const ModelConfig& model,
                      const ActorNet& actor, int n_episodes, int length, std::uint64_t seed,
                      const char* stream_tag, bool parallel) {
  CompareReport report;
  report.m = topo.m;
  report.length = length;
  report.nmpa_runs.resize(n_episodes);
  report.mpa_runs.resize(n_episodes);
  report.episodes.resize(n_episodes);

  const std::string topo_tag = std::string(stream_tag) + "-topology";
  const std::string fading_tag = std::string(stream_tag) + "-fading";
  const std::string battery_tag = std::string(stream_tag) + "-battery";

  EnvConfig ep_env = env;
  ep_env.horizon = length;

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int e = 0; e < n_episodes; ++e) {
    RngStream topo_rng = derive_stream(seed, topo_tag, e);
    RngStream fading_rng = derive_stream(seed, fading_tag, e);
    RngStream battery_rng = derive_stream(seed, battery_tag, e);
    const Episode episode = sample_episode(topo, length, topo_rng, fading_rng);
    const BatteryState b0 = sample_initial_battery(ep_env, topo.m, battery_rng);
    report.nmpa_runs[e] = run_nmpa(episode, b0, actor, model, ep_env, wmmse);
    report.mpa_runs[e] = run_mpa(episode, b0, ep_env, wmmse);
  }

  std::vector<double> nmpa_sums, mpa_sums, improvements;
  long long nmpa_viol = 0, mpa_viol = 0;
  for (int e = 0; e < n_episodes; ++e) {
    EpisodePair& pair = report.episodes[e];
    pair.nmpa_sum_rate = report.nmpa_runs[e].episodic_sum_rate;
    pair.mpa_sum_rate = report.mpa_runs[e].episodic_sum_rate;
    pair.nmpa_violations = report.nmpa_runs[e].violation_events;
    pair.mpa_violations = report.mpa_runs[e].violation_events;
    pair.improvement = pair.mpa_sum_rate != 0.0
                           ? (pair.nmpa_sum_rate - pair.mpa_sum_rate) / pair.mpa_sum_rate
                           : 0.0;
    nmpa_sums.push_back(pair.nmpa_sum_rate);
    mpa_sums.push_back(pair.mpa_sum_rate);
    improvements.push_back(pair.improvement);
    nmpa_viol += pair.nmpa_violations;
    mpa_viol += pair.mpa_violations;
  }
  const MeanStd nm = mean_std(nmpa_sums), mp = mean_std(mpa_sums), im = mean_std(improvements);
  report.nmpa_mean = nm.mean;
  report.nmpa_std = nm.std_dev;
  report.mpa_mean = mp.mean;
  report.mpa_std = mp.std_dev;
  report.mean_improvement = im.mean;
  report.std_improvement = im.std_dev;
  if (n_episodes > 0) {
    report.nmpa_violations_per_tx = static_cast<double>(nmpa_viol) / (topo.m * n_episodes);
    report.mpa_violations_per_tx = static_cast<double>(mpa_viol) / (topo.m * n_episodes);
  }
  return report;
}

std::vector<SweepRow> sweep_lengths(const TopologyConfig& topo, const EnvConfig& env,
                                    const WmmseConfig& wmmse, const ModelConfig& model,
                                    const ActorNet& actor, const std::vector<int>& lengths,
                                    int n_episodes, std::uint64_t seed, bool parallel) {
  std::vector<SweepRow> rows;
  for (int length : lengths) {
    // Each length gets its own stream family so samples stay independent.
    const std::string tag = "sweep-" + std::to_string(length);
    const CompareReport rep = compare(topo, env, wmmse, model, actor, n_episodes, length,
                                      seed, tag.c_str(), parallel);
    SweepRow row;
    row.length = length;
    row.nmpa_mean = rep.nmpa_mean;
    row.nmpa_std = rep.nmpa_std;
    row.mpa_mean = rep.mpa_mean;
    row.mpa_std = rep.mpa_std;
    row.mean_improvement = rep.mean_improvement;
    row.n_episodes = n_episodes;
    rows.push_back(row);
  }
  return rows;
}

ScaleHistogram scale_histogram(const std::vector<RolloutResult>& nmpa_runs, double battery_max,
                               int bins) {
  ScaleHistogram hist;
  hist.bins = bins;
  hist.battery_max = battery_max;
  hist.counts.assign(static_cast<size_t>(bins) * bins, 0);
  hist.mean_scale.assign(static_cast<size_t>(bins) * bins, 0.0);

  std::vector<double> rates;
  for (const RolloutResult& run : nmpa_runs)
    for (const ScaleRecord& rec : run.scales) rates.push_back(rec.achievable_rate);
  if (rates.empty()) return hist;

  // Nearest-rank p99 caps the rate axis; records above it clamp into the
  // last bin so the bin counts still conserve the record count.
  std::vector<double> sorted = rates;
  std::sort(sorted.begin(), sorted.end());
  const size_t rank = static_cast<size_t>(std::ceil(0.99 * sorted.size()));
  hist.rate_max = sorted[std::min(rank == 0 ? 0 : rank - 1, sorted.size() - 1)];
  if (hist.rate_max <= 0.0) hist.rate_max = 1.0;

  auto bin_of = [bins](double v, double vmax) {
    const int b = static_cast<int>(v / vmax * bins);
    return std::clamp(b, 0, bins - 1);
  };
  for (const RolloutResult& run : nmpa_runs)
    for (const ScaleRecord& rec : run.scales) {
      const size_t idx = static_cast<size_t>(bin_of(rec.battery, hist.battery_max)) * bins +
                         bin_of(rec.achievable_rate, hist.rate_max);
      ++hist.counts[idx];
      hist.mean_scale[idx] += rec.scale;
      ++hist.total;
    }
  for (size_t i = 0; i < hist.counts.size(); ++i)
    if (hist.counts[i] > 0) hist.mean_scale[i] /= hist.counts[i];
  return hist;
}

void write_cumulative_csv(std::ostream& os, const CompareReport& report) {
  os << "episode,t,nmpa_rate,mpa_rate,nmpa_cum,mpa_cum\n";
  for (size_t e = 0; e < report.nmpa_runs.size(); ++e) {
    double nmpa_cum = 0.0, mpa_cum = 0.0;
    const auto& nm = report.nmpa_runs[e].trace;
    const auto& mp = report.mpa_runs[e].trace;
    for (size_t t = 0; t < nm.size(); ++t) {
      nmpa_cum += nm[t].sum_rate;
      mpa_cum += mp[t].sum_rate;
      os << e << ',' << nm[t].t << ',' << format_double(nm[t].sum_rate) << ','
         << format_double(mp[t].sum_rate) << ',' << format_double(nmpa_cum) << ','
         << format_double(mpa_cum) << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "length,n_episodes,nmpa_mean,nmpa_std,mpa_mean,mpa_std,mean_improvement\n";
  for (const SweepRow& r : rows)
    os << r.length << ',' << r.n_episodes << ',' << format_double(r.nmpa_mean) << ','
       << format_double(r.nmpa_std) << ',' << format_double(r.mpa_mean) << ','
       << format_double(r.mpa_std) << ',' << format_double(r.mean_improvement) << '\n';
}

void write_histogram_csv(std::ostream& os, const ScaleHistogram& hist) {
  os << "battery_lo,battery_hi,rate_lo,rate_hi,count,mean_scale\n";
  const double bw = hist.battery_max / hist.bins;
  const double rw = hist.rate_max / hist.bins;
  for (int bi = 0; bi < hist.bins; ++bi)
    for (int ri = 0; ri < hist.bins; ++ri) {
      const size_t idx = static_cast<size_t>(bi) * hist.bins + ri;
      os << format_double(bi * bw) << ',' << format_double((bi + 1) * bw) << ','
         << format_double(ri * rw) << ',' << format_double((ri + 1) * rw) << ','
         << hist.counts[idx] << ',';
      // Empty bins stay missing rather than reading as scale zero.
      if (hist.counts[idx] > 0) os << format_double(hist.mean_scale[idx]);
      os << '\n';
    }
}

nlohmann::json summary_json(const CompareReport& report, const std::vector<SweepRow>& sweep) {
  nlohmann::json j;
  j["m"] = report.m;
  j["length"] = report.length;
  j["n_episodes"] = report.episodes.size();
  j["nmpa_mean_episodic_sum_rate"] = report.nmpa_mean;
  j["nmpa_std_episodic_sum_rate"] = report.nmpa_std;
  j["mpa_mean_episodic_sum_rate"] = report.mpa_mean;
  j["mpa_std_episodic_sum_rate"] = report.mpa_std;
  j["mean_improvement"] = report.mean_improvement;
  j["std_improvement"] = report.std_improvement;
  j["nmpa_violations_per_tx_per_episode"] = report.nmpa_violations_per_tx;
  j["mpa_violations_per_tx_per_episode"] = report.mpa_violations_per_tx;
  nlohmann::json per_episode = nlohmann::json::array();
  for (const EpisodePair& p : report.episodes)
    per_episode.push_back({{"nmpa", p.nmpa_sum_rate},
                           {"mpa", p.mpa_sum_rate},
                           {"improvement", p.improvement},
                           {"nmpa_violations", p.nmpa_violations},
                           {"mpa_violations", p.mpa_violations}});
  j["episodes"] = std::move(per_episode);
  nlohmann::json sweep_rows = nlohmann::json::array();
  for (const SweepRow& r : sweep)
    sweep_rows.push_back({{"length", r.length},
                          {"nmpa_mean", r.nmpa_mean},
                          {"mpa_mean", r.mpa_mean},
                          {"mean_improvement", r.mean_improvement},
                          {"n_episodes", r.n_episodes}});
  j["sweep"] = std::move(sweep_rows);
  return j;
}

}  // namespace nmpa
