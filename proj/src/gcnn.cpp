#include "nmpa/gcnn.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace nmpa {

GraphPowers make_powers(const ChannelMatrix& ch, bool normalize) {
  GraphPowers p;
  p.m = ch.m;
  p.h1 = ch.entries;
  if (normalize) {
    double inf_norm = 0.0;
    for (int i = 0; i < ch.m; ++i) {
      double row = 0.0;
      for (int j = 0; j < ch.m; ++j) row += std::abs(p.h1(i, j));
      inf_norm = std::max(inf_norm, row);
    }
    if (inf_norm > 1.0)
      for (double& v : p.h1.a) v /= inf_norm;
  }
  matmul(p.h1, p.h1, p.h2);
  return p;
}

void GcnnParams::check_shapes() const {
  const int in[kNumLayers] = {f_in, hidden};
  const int out[kNumLayers] = {hidden, f_out};
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v)
      if (taps[l][v].rows != in[l] || taps[l][v].cols != out[l])
        throw std::invalid_argument("GcnnParams: tap shape mismatch");
}

GcnnParams init_gcnn(int f_in, int hidden, int f_out, RngStream& rng, double leaky_slope,
                     double output_scale) {
  GcnnParams p;
  p.f_in = f_in;
  p.hidden = hidden;
  p.f_out = f_out;
  p.leaky_slope = leaky_slope;
  const int in[kNumLayers] = {f_in, hidden};
  const int out[kNumLayers] = {hidden, f_out};
  for (int l = 0; l < kNumLayers; ++l) {
    const double bound = (l + 1 == kNumLayers ? output_scale : 1.0) / std::sqrt(in[l]);
    for (int v = 0; v < kNumTaps; ++v) {
      Mat t(in[l], out[l]);
      for (double& x : t.a) x = rng.uniform(-bound, bound);
      p.taps[l][v] = std::move(t);
    }
  }
  return p;
}

namespace {

// acc += H^v * X for the three orders, v = 0 being the identity.
void filter_layer(const GraphPowers& powers, const Mat& x,
                  const std::array<Mat, kNumTaps>& taps, Mat& pre, Mat& scratch) {
  pre = Mat(x.rows, taps[0].cols);
  matmul_acc(x, taps[0], pre);
  matmul(powers.h1, x, scratch);
  matmul_acc(scratch, taps[1], pre);
  matmul(powers.h2, x, scratch);
  matmul_acc(scratch, taps[2], pre);
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

Mat gcnn_forward(const GraphPowers& powers, const Mat& x, const GcnnParams& params,
                 OutputNonlinearity out_nl, GcnnCache* cache) {
  params.check_shapes();
  if (x.rows != powers.m || x.cols != params.f_in)
    throw std::invalid_argument("gcnn_forward: input shape mismatch");

  Mat scratch;
  Mat z_pre;
  filter_layer(powers, x, params.taps[0], z_pre, scratch);

  Mat z = z_pre;
  for (double& v : z.a)
    if (v < 0.0) v *= params.leaky_slope;

  Mat y_pre;
  filter_layer(powers, z, params.taps[1], y_pre, scratch);

  Mat y = y_pre;
  if (out_nl == OutputNonlinearity::Sigmoid)
    for (double& v : y.a) v = sigmoid(v);

  if (cache) {
    cache->x = x;
    cache->z_pre = std::move(z_pre);
    cache->z = std::move(z);
    cache->y_pre = std::move(y_pre);
    cache->y = y;
  }
  return y;
}

void GcnnGrads::init_like(const GcnnParams& params) {
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v)
      taps[l][v] = Mat(params.taps[l][v].rows, params.taps[l][v].cols);
}

void GcnnGrads::zero() {
  for (auto& layer : taps)
    for (Mat& t : layer) t.zero();
}

void GcnnGrads::add(const GcnnGrads& other) {
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v) add_scaled(taps[l][v], other.taps[l][v], 1.0);
}

namespace {

// Gradients through one filter layer: given d(pre), accumulate tap gradients
// and return d(input). input_powers[v] = H^v * input are recomputed here.
void filter_backward(const GraphPowers& powers, const Mat& input,
                     const std::array<Mat, kNumTaps>& taps, const Mat& d_pre,
                     std::array<Mat, kNumTaps>& tap_grads, Mat* d_input) {
  Mat hx;
  // v = 0
  matmul_tn_acc(input, d_pre, tap_grads[0]);
  if (d_input) {
    *d_input = Mat(input.rows, input.cols);
    matmul_nt_acc(d_pre, taps[0], *d_input);
  }
  // v = 1
  matmul(powers.h1, input, hx);
  matmul_tn_acc(hx, d_pre, tap_grads[1]);
  if (d_input) {
    Mat tmp(input.rows, input.cols);
    matmul_nt_acc(d_pre, taps[1], tmp);
    matmul_tn_acc(powers.h1, tmp, *d_input);
  }
  // v = 2
  matmul(powers.h2, input, hx);
  matmul_tn_acc(hx, d_pre, tap_grads[2]);
  if (d_input) {
    Mat tmp(input.rows, input.cols);
    matmul_nt_acc(d_pre, taps[2], tmp);
    matmul_tn_acc(powers.h2, tmp, *d_input);
  }
}

}  // namespace

void gcnn_backward(const GraphPowers& powers, const GcnnParams& params,
                   const GcnnCache& cache, OutputNonlinearity out_nl, const Mat& dy,
                   GcnnGrads* grads, Mat* dx) {
  if (!dy.same_shape(cache.y)) throw std::invalid_argument("gcnn_backward: dy shape");
  grads->init_like(params);

  Mat d_ypre = dy;
  if (out_nl == OutputNonlinearity::Sigmoid)
    for (size_t i = 0; i < d_ypre.a.size(); ++i) {
      const double s = cache.y.a[i];
      d_ypre.a[i] *= s * (1.0 - s);
    }

  Mat dz;
  filter_backward(powers, cache.z, params.taps[1], d_ypre, grads->taps[1], &dz);

  // leakyReLU': slope 1 for z_pre >= 0 (subgradient 1 at the kink).
  for (size_t i = 0; i < dz.a.size(); ++i)
    if (cache.z_pre.a[i] < 0.0) dz.a[i] *= params.leaky_slope;

  filter_backward(powers, cache.x, params.taps[0], dz, grads->taps[0], dx);
}

nlohmann::json gcnn_to_json(const GcnnParams& params) {
  nlohmann::json j;
  j["f_in"] = params.f_in;
  j["hidden"] = params.hidden;
  j["f_out"] = params.f_out;
  j["leaky_slope"] = params.leaky_slope;
  nlohmann::json tensors = nlohmann::json::array();
  for (int l = 0; l < kNumLayers; ++l)
    for (int v = 0; v < kNumTaps; ++v) {
      const Mat& t = params.taps[l][v];
      tensors.push_back({{"layer", l},
                         {"order", v},
                         {"shape", {t.rows, t.cols}},
                         {"data", t.a}});
    }
  j["taps"] = std::move(tensors);
  return j;
}

GcnnParams gcnn_from_json(const nlohmann::json& j) {
  GcnnParams p;
  p.f_in = j.at("f_in").get<int>();
  p.hidden = j.at("hidden").get<int>();
  p.f_out = j.at("f_out").get<int>();
  p.leaky_slope = j.at("leaky_slope").get<double>();
  for (const auto& t : j.at("taps")) {
    const int l = t.at("layer").get<int>();
    const int v = t.at("order").get<int>();
    if (l < 0 || l >= kNumLayers || v < 0 || v >= kNumTaps)
      throw std::runtime_error("gcnn_from_json: bad tensor index");
    const auto shape = t.at("shape");
    p.taps[l][v] = Mat(shape.at(0).get<int>(), shape.at(1).get<int>(), t.at("data").get<Vec>());
  }
  p.check_shapes();
  return p;
}

}  // namespace nmpa
