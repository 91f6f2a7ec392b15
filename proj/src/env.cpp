#include "nmpa/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nmpa/io.hpp"

namespace nmpa {

BatteryState sample_initial_battery(const EnvConfig& cfg, int m, RngStream& rng) {
  cfg.validate();
  BatteryState b;
  b.levels.reserve(m);
  for (int i = 0; i < m; ++i) b.levels.push_back(rng.uniform(0.5 * cfg.b_max, cfg.b_max));
  return b;
}

Vec rate_per_link(const Vec& p, const ChannelMatrix& ch, double sigma_n) {
  const int m = ch.m;
  Vec c(m, 0.0);
  const double noise = sigma_n * sigma_n;
  for (int i = 0; i < m; ++i) {
    const double hii = ch(i, i);
    double interference = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double hij = ch(i, j);
      interference += hij * hij * p[j];
    }
    c[i] = std::log2(1.0 + hii * hii * p[i] / (noise + interference));
  }
  return c;
}

double sum_rate(const Vec& p, const ChannelMatrix& ch, double sigma_n) {
  const Vec c = rate_per_link(p, ch, sigma_n);
  double s = 0.0;
  for (double ci : c) s += ci;
  return s;
}

StepOutcome apply_step(const BatteryState& battery, const ChannelMatrix& ch, const Vec& p,
                       const EnvConfig& cfg, bool is_last) {
  const int m = ch.m;
  if (static_cast<int>(p.size()) != m || battery.size() != m)
    throw std::invalid_argument("apply_step: dimension mismatch");
  for (double pi : p)
    if (!(pi >= 0.0 && pi <= cfg.p_max))
      throw std::domain_error("apply_step: allocated power outside [0, p_max]");

  StepOutcome out;
  out.terminal = is_last;
  out.power.allocated = p;
  out.power.transmitted.resize(m);
  out.next_battery.levels.resize(m);

  for (int i = 0; i < m; ++i) {
    const double b = battery.levels[i];
    const double headroom = std::max(b - cfg.alpha, 0.0);
    const double phat = std::min(p[i], headroom);
    out.power.transmitted[i] = phat;
    const bool transmits = phat > cfg.tx_threshold;
    out.next_battery.levels[i] =
        std::max(b - phat - (transmits ? cfg.alpha : 0.0), 0.0);
    // A violation is an attempted transmission the battery cannot support:
    // allocations at or below tx_threshold never count (the sigmoid head
    // cannot emit an exact zero).
    if (p[i] > cfg.tx_threshold && p[i] > headroom) ++out.violations;
  }

  const Vec c = rate_per_link(out.power.transmitted, ch, cfg.sigma_n);
  for (double ci : c) out.sum_rate += ci;
  out.reward = out.sum_rate - cfg.penalty * out.violations;
  return out;
}

BatteryEnv::BatteryEnv(EnvConfig cfg, Episode episode, BatteryState b0)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  reset(std::move(episode), std::move(b0));
}

const ChannelMatrix& BatteryEnv::current_channel() const {
  if (done()) throw std::logic_error("BatteryEnv: episode already finished");
  return episode_.steps[t_];
}

StepOutcome BatteryEnv::step(const Vec& allocated) {
  const ChannelMatrix& ch = current_channel();
  StepOutcome out = apply_step(battery_, ch, allocated, cfg_, t_ + 1 == episode_.length());
  battery_ = out.next_battery;
  ++t_;
  return out;
}

void BatteryEnv::reset(Episode episode, BatteryState b0) {
  if (episode.length() < 1) throw std::invalid_argument("BatteryEnv: empty episode");
  if (b0.size() != episode.m())
    throw std::invalid_argument("BatteryEnv: battery size does not match episode");
  episode_ = std::move(episode);
  battery_ = std::move(b0);
  t_ = 0;
}

void write_trace_csv(std::ostream& os, const std::vector<StepTraceRow>& rows) {
  if (rows.empty()) return;
  const int m = static_cast<int>(rows.front().battery_before.size());
  os << "t";
  for (int i = 0; i < m; ++i) os << ",battery_" << i;
  for (int i = 0; i < m; ++i) os << ",alloc_" << i;
  for (int i = 0; i < m; ++i) os << ",tx_" << i;
  os << ",sum_rate,violations\n";
  for (const StepTraceRow& row : rows) {
    os << row.t;
    for (double v : row.battery_before) os << ',' << format_double(v);
    for (double v : row.allocated) os << ',' << format_double(v);
    for (double v : row.transmitted) os << ',' << format_double(v);
    os << ',' << format_double(row.sum_rate) << ',' << row.violations << '\n';
  }
}

}  // namespace nmpa
