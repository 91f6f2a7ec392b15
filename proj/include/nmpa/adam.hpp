#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace nmpa {

// Adaptive-moment gradient step over a list of (parameter, gradient) views.
// View layout must be identical on every call for one optimizer instance.
class Adam {
 public:
  struct View {
    double* param;
    const double* grad;
    size_t n;
  };

  Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<View>& views) {
    size_t total = 0;
    for (const View& v : views) total += v.n;
    if (m_.size() != total) {
      m_.assign(total, 0.0);
      v_.assign(total, 0.0);
      t_ = 0;
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    size_t off = 0;
    for (const View& view : views) {
      for (size_t i = 0; i < view.n; ++i) {
        const double g = view.grad[i];
        double& m = m_[off + i];
        double& v = v_[off + i];
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        view.param[i] -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_);
      }
      off += view.n;
    }
  }

  long long steps_taken() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace nmpa
