#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "audiossl/error.hpp"
#include "audiossl/network.hpp"
#include "audiossl/tensor.hpp"

namespace audiossl {

// Standard bias-corrected Adam over a parameter registry. Moment buffers are
// aligned with the trainable entries in registry order.
template <class T>
class Adam {
 public:
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  Adam() = default;
  explicit Adam(double learning_rate) : lr(learning_rate) {}

  void init(const ParamRefs<T>& refs) {
    m_.clear();
    v_.clear();
    for (const auto& r : refs) {
      if (!r.trainable) continue;
      m_.emplace_back(r.value->shape());
      v_.emplace_back(r.value->shape());
    }
    step_count_ = 0;
  }

  long step_count() const { return step_count_; }

  void step(const ParamRefs<T>& refs) {
    if (m_.empty()) init(refs);
    ++step_count_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count_));
    std::size_t slot = 0;
    for (const auto& r : refs) {
      if (!r.trainable) continue;
      Tensor<T>& m = m_[slot];
      Tensor<T>& v = v_[slot];
      ++slot;
      Tensor<T>& p = *r.value;
      const Tensor<T>& g = *r.grad;
      if (g.size() != p.size())
        throw ShapeError("Adam: gradient/parameter size mismatch for " + r.name);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double gi = static_cast<double>(g[i]);
        if (!std::isfinite(gi))
          throw NumericError("Adam: non-finite gradient in " + r.name +
                             " at step " + std::to_string(step_count_));
        const double mi = beta1 * m[i] + (1.0 - beta1) * gi;
        const double vi = beta2 * v[i] + (1.0 - beta2) * gi * gi;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double mhat = mi / bc1;
        const double vhat = vi / bc2;
        p[i] = static_cast<T>(p[i] - lr * mhat / (std::sqrt(vhat) + eps));
      }
    }
  }

 private:
  std::vector<Tensor<T>> m_, v_;
  long step_count_ = 0;
};

}  // namespace audiossl
