#include "nmpa/wmmse.hpp"

#include <algorithm>
#include <cmath>

#include "nmpa/env.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nmpa {

namespace {

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Vec bcd_iterate(const ChannelMatrix& ch, const WmmseConfig& cfg) {
  const int m = ch.m;
  const double noise = cfg.sigma_n * cfg.sigma_n;
  const double v_cap = std::sqrt(cfg.p_max);

  Vec v(m, v_cap), u(m, 0.0), w(m, 0.0);
  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < m; ++i) {
      double rx_power = noise;
      for (int j = 0; j < m; ++j) {
        const double hij = ch(i, j);
        rx_power += hij * hij * v[j] * v[j];
      }
      u[i] = ch(i, i) * v[i] / rx_power;
    }
    for (int i = 0; i < m; ++i) w[i] = 1.0 / (1.0 - u[i] * ch(i, i) * v[i] + cfg.epsilon);
    for (int i = 0; i < m; ++i) {
      double denom = cfg.epsilon;
      for (int j = 0; j < m; ++j) {
        const double hji = ch(j, i);
        denom += hji * hji * u[j] * u[j] * w[j];
      }
      v[i] = std::clamp(ch(i, i) * u[i] * w[i] / denom, 0.0, v_cap);
    }
    if (!all_finite(u) || !all_finite(w) || !all_finite(v)) throw SolverDivergence(it);
  }

  Vec p(m);
  for (int i = 0; i < m; ++i) p[i] = v[i] * v[i];
  return p;
}

}  // namespace

Vec wmmse_solve(const ChannelMatrix& ch, const WmmseConfig& cfg) {
  cfg.validate();
  const int m = ch.m;

  Vec best = bcd_iterate(ch, cfg);
  double best_rate = sum_rate_of(ch, best, cfg.sigma_n);

  // Candidate sweep; ties keep the earlier candidate so the BCD output wins
  // when it matches the full-power point.
  auto consider = [&](const Vec& candidate) {
    const double rate = sum_rate_of(ch, candidate, cfg.sigma_n);
    if (rate > best_rate) {
      best = candidate;
      best_rate = rate;
    }
  };
  consider(Vec(m, cfg.p_max));
  Vec corner(m, 0.0);
  for (int i = 0; i < m; ++i) {
    corner[i] = cfg.p_max;
    consider(corner);
    corner[i] = 0.0;
  }
  return best;
}

double sum_rate_of(const ChannelMatrix& ch, const Vec& p, double sigma_n) {
  return sum_rate(p, ch, sigma_n);
}

std::vector<Vec> wmmse_solve_batch_serial(const std::vector<ChannelMatrix>& channels,
                                          const WmmseConfig& cfg) {
  std::vector<Vec> out(channels.size());
  for (size_t k = 0; k < channels.size(); ++k) out[k] = wmmse_solve(channels[k], cfg);
  return out;
}

std::vector<Vec> wmmse_solve_batch(const std::vector<ChannelMatrix>& channels,
                                   const WmmseConfig& cfg) {
  std::vector<Vec> out(channels.size());
  const int n = static_cast<int>(channels.size());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) out[k] = wmmse_solve(channels[k], cfg);
  return out;
}

}  // namespace nmpa
