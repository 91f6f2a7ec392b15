#pragma once

#include <array>
#include <stdexcept>

#include "nmpa/channel.hpp"
#include "nmpa/mat.hpp"
#include "nmpa/rng.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nmpa {

// Graph-filter operator powers H^0 = I (implicit), H^1, H^2, computed once
// per step and shared by the actor and both critics.
struct GraphPowers {
  int m = 0;
  Mat h1;
  Mat h2;
};

// `normalize` divides H by max(1, ||H||_inf) before taking powers; the raw
// operator is the default.
GraphPowers make_powers(const ChannelMatrix& ch, bool normalize = false);

enum class OutputNonlinearity { Sigmoid, Identity };

inline constexpr int kNumTaps = 3;   // polynomial orders v = 0, 1, 2
inline constexpr int kNumLayers = 2;

// Filter-tap coefficients theta[layer][order], each f_in x f_out for that
// layer. Two layers, three taps per layer.
struct GcnnParams {
  int f_in = 1;
  int hidden = 32;
  int f_out = 1;
  double leaky_slope = 0.01;
  std::array<std::array<Mat, kNumTaps>, kNumLayers> taps;

  void check_shapes() const;
};

// Scaled-uniform init; the output-layer taps start small so sigmoid heads
// open at 0.5 with healthy gradients regardless of the input magnitude.
GcnnParams init_gcnn(int f_in, int hidden, int f_out, RngStream& rng,
                     double leaky_slope = 0.01, double output_scale = 1e-3);

// Forward intermediates kept for the backward pass.
struct GcnnCache {
  Mat x;
  Mat z_pre;
  Mat z;
  Mat y_pre;
  Mat y;
};

// y = sigma( sum_v H^v leakyReLU( sum_v H^v x theta_0v ) theta_1v )
Mat gcnn_forward(const GraphPowers& powers, const Mat& x, const GcnnParams& params,
                 OutputNonlinearity out_nl, GcnnCache* cache = nullptr);

struct GcnnGrads {
  std::array<std::array<Mat, kNumTaps>, kNumLayers> taps;

  void init_like(const GcnnParams& params);
  void zero();
  void add(const GcnnGrads& other);
};

// Exact reverse-mode gradients of the forward map for every tap tensor and
// the input signal. leakyReLU takes slope 1 at exactly 0.
void gcnn_backward(const GraphPowers& powers, const GcnnParams& params,
                   const GcnnCache& cache, OutputNonlinearity out_nl, const Mat& dy,
                   GcnnGrads* grads, Mat* dx = nullptr);

// Named-tensor JSON dump; doubles round-trip bit-exactly.
nlohmann::json gcnn_to_json(const GcnnParams& params);
GcnnParams gcnn_from_json(const nlohmann::json& j);

}  // namespace nmpa
