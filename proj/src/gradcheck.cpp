#include "nmpa/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nmpa/policy.hpp"

namespace nmpa {

namespace {

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-6, std::abs(analytic) + std::abs(numeric));
}

// Moderate-magnitude random instances keep the sigmoid away from its flat
// tails, where finite differences degenerate.
ChannelMatrix random_channel(int m, RngStream& rng) {
  ChannelMatrix ch;
  ch.m = m;
  ch.entries = Mat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j)
        ch.entries(i, j) = rng.uniform(0.2, 1.0);
      else if (rng.uniform() < 0.6)
        ch.entries(i, j) = rng.uniform(0.0, 0.5);
    }
  return ch;
}

GcnnParams random_params(int f_in, int hidden, int f_out, RngStream& rng) {
  GcnnParams p;
  p.f_in = f_in;
  p.hidden = hidden;
  p.f_out = f_out;
  const int in[kNumLayers] = {f_in, hidden};
  const int out[kNumLayers] = {hidden, f_out};
  for (int l = 0; l < kNumLayers; ++l) {
    const double bound = 0.5 / std::sqrt(in[l]);
    for (int v = 0; v < kNumTaps; ++v) {
      Mat t(in[l], out[l]);
      for (double& x : t.a) x = rng.uniform(-bound, bound);
      p.taps[l][v] = std::move(t);
    }
  }
  return p;
}

struct InstanceResult {
  double max_rel = 0.0;
  long long coords = 0;
};

void check_coord(double* coord, const std::function<double()>& probe, double analytic,
                 double h, InstanceResult& res) {
  const double saved = *coord;
  *coord = saved + h;
  const double up = probe();
  *coord = saved - h;
  const double down = probe();
  *coord = saved;
  const double numeric = (up - down) / (2.0 * h);
  res.max_rel = std::max(res.max_rel, rel_error(analytic, numeric));
  ++res.coords;
}

InstanceResult check_actor_instance(int m, int hidden, double h, RngStream& rng) {
  ChannelMatrix ch = random_channel(m, rng);
  const GraphPowers powers = make_powers(ch);
  GcnnParams params = random_params(1, hidden, 1, rng);
  Mat x(m, 1);
  for (double& v : x.a) v = rng.uniform(0.5, 2.0);
  Mat probe_w(m, 1);
  for (double& v : probe_w.a) v = rng.uniform(-1.0, 1.0);

  // Scalar probe: sum(probe_w .* forward(x)).
  auto probe = [&]() {
    const Mat y = gcnn_forward(powers, x, params, OutputNonlinearity::Sigmoid);
    double s = 0.0;
    for (size_t i = 0; i < y.a.size(); ++i) s += probe_w.a[i] * y.a[i];
    return s;
  };

  GcnnCache cache;
  gcnn_forward(powers, x, params, OutputNonlinearity::Sigmoid, &cache);
  GcnnGrads grads;
  Mat dx;
  gcnn_backward(powers, params, cache, OutputNonlinearity::Sigmoid, probe_w, &grads, &dx);

  InstanceResult res;
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v)
      for (size_t i = 0; i < params.taps[l][v].a.size(); ++i)
        check_coord(&params.taps[l][v].a[i], probe, grads.taps[l][v].a[i], h, res);
  for (size_t i = 0; i < x.a.size(); ++i) check_coord(&x.a[i], probe, dx.a[i], h, res);
  return res;
}

InstanceResult check_critic_instance(int m, int hidden, double h, RngStream& rng) {
  ChannelMatrix ch = random_channel(m, rng);
  const GraphPowers powers = make_powers(ch);
  CriticNet critic;
  critic.gcnn = random_params(2, hidden, hidden, rng);
  critic.readout_w.resize(hidden);
  for (double& w : critic.readout_w) w = rng.uniform(-0.5, 0.5);
  critic.readout_b = rng.uniform(-0.5, 0.5);
  Mat feat(m, 2);
  for (int i = 0; i < m; ++i) {
    feat(i, 0) = rng.uniform(0.5, 2.0);
    feat(i, 1) = rng.uniform(0.0, 1.0);
  }

  auto probe = [&]() { return critic_value(critic, powers, feat); };

  GcnnCache cache;
  critic_value(critic, powers, feat, &cache);
  CriticGrads grads;
  Mat dfeat;
  critic_backward(critic, powers, cache, 1.0, &grads, &dfeat);

  InstanceResult res;
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v)
      for (size_t i = 0; i < critic.gcnn.taps[l][v].a.size(); ++i)
        check_coord(&critic.gcnn.taps[l][v].a[i], probe, grads.gcnn.taps[l][v].a[i], h, res);
  for (size_t i = 0; i < critic.readout_w.size(); ++i)
    check_coord(&critic.readout_w[i], probe, grads.readout_w[i], h, res);
  check_coord(&critic.readout_b, probe, grads.readout_b, h, res);
  for (size_t i = 0; i < feat.a.size(); ++i) check_coord(&feat.a[i], probe, dfeat.a[i], h, res);
  return res;
}

}  // namespace

GradCheckResult run_gradcheck(int instances, const std::vector<int>& sizes,
                              std::uint64_t seed, int hidden, double fd_step, bool parallel) {
  std::vector<InstanceResult> results(instances);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < instances; ++k) {
    RngStream rng = derive_stream(seed, "gradcheck", k);
    const int m = sizes[k % sizes.size()];
    results[k] = (k % 2 == 0) ? check_actor_instance(m, hidden, fd_step, rng)
                              : check_critic_instance(m, hidden, fd_step, rng);
  }

  GradCheckResult out;
  out.instances = instances;
  for (const InstanceResult& r : results) {
    out.max_rel_error = std::max(out.max_rel_error, r.max_rel);
    out.coordinates += r.coords;
  }
  return out;
}

}  // namespace nmpa
