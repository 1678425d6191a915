#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "audiossl/error.hpp"
#include "audiossl/rng.hpp"
#include "audiossl/tensor.hpp"

namespace audiossl {

struct AugmentConfig {
  double mixup_max_ratio = 0.4;
  std::size_t memory_size = 2048;
  std::pair<double, double> crop_freq_scale{0.6, 1.5};
  std::pair<double, double> crop_time_scale{0.6, 1.5};
  std::pair<double, double> fader_db_range{-10.0, 10.0};

  void validate() const {
    if (mixup_max_ratio < 0.0 || mixup_max_ratio > 1.0)
      throw ValueError("augment: mixup_max_ratio must be in [0, 1]");
    if (memory_size < 1) throw ValueError("augment: memory_size must be >= 1");
    for (const auto& r : {crop_freq_scale, crop_time_scale, fader_db_range})
      if (r.first > r.second)
        throw ValueError("augment: inverted parameter range");
  }
};

// FIFO ring of past normalized spectrograms used as mixup partners.
template <class T>
class MixupMemory {
 public:
  explicit MixupMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity < 1) throw ValueError("MixupMemory: capacity must be >= 1");
  }

  void push(const Mat<T>& x) {
    if (items_.size() < capacity_) {
      items_.push_back(x);
    } else {
      items_[next_] = x;
      next_ = (next_ + 1) % capacity_;
    }
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  const Mat<T>& sample(Rng& rng) const {
    return items_[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(items_.size()) - 1))];
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Mat<T>> items_;
};

// Blend with a stored example in the exp (power-like) domain:
// log((1-lambda) exp(x) + lambda exp(m)); x is pushed into memory afterwards.
// With an empty memory the input passes through unchanged.
template <class T>
Mat<T> mixup_log(const Mat<T>& x, MixupMemory<T>& mem, double lambda,
                 Rng& rng) {
  Mat<T> out = x;
  if (!mem.empty() && lambda > 0.0) {
    const Mat<T>& m = mem.sample(rng);
    if (m.rows != x.rows || m.cols != x.cols)
      throw ShapeError("mixup_log: memory item shape mismatch");
    if (lambda >= 1.0) {
      out = m;
    } else {
      const T lam = static_cast<T>(lambda);
      for (std::size_t i = 0; i < out.v.size(); ++i) {
        out.v[i] = std::log((T(1) - lam) * std::exp(x.v[i]) +
                            lam * std::exp(m.v[i]));
      }
    }
  }
  mem.push(x);
  return out;
}

namespace detail {

// Edge-replicated read from the virtually padded canvas: canvas coordinates
// map back into the source with a centered paste offset.
template <class T>
inline T canvas_at(const Mat<T>& x, long r, long c, long pad_r, long pad_c) {
  const long rr = std::clamp<long>(r - pad_r, 0, static_cast<long>(x.rows) - 1);
  const long cc = std::clamp<long>(c - pad_c, 0, static_cast<long>(x.cols) - 1);
  return x(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
}

}  // namespace detail

// Crop a randomly sized rectangle from the edge-padded canvas and bilinearly
// resize it back to the input shape. Canvas extent is max(1, scale_max)
// times the input per axis, with the input pasted centered.
template <class T>
Mat<T> random_resize_crop(const Mat<T>& x, const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  const long F = static_cast<long>(x.rows), W = static_cast<long>(x.cols);
  const long canvas_h = static_cast<long>(
      std::ceil(std::max(1.0, cfg.crop_freq_scale.second) * static_cast<double>(F)));
  const long canvas_w = static_cast<long>(
      std::ceil(std::max(1.0, cfg.crop_time_scale.second) * static_cast<double>(W)));
  const long pad_r = (canvas_h - F) / 2, pad_c = (canvas_w - W) / 2;

  const double uf = uniform(rng, cfg.crop_freq_scale.first, cfg.crop_freq_scale.second);
  const double ut = uniform(rng, cfg.crop_time_scale.first, cfg.crop_time_scale.second);
  const long hc = std::clamp<long>(std::lround(uf * static_cast<double>(F)), 1, canvas_h);
  const long wc = std::clamp<long>(std::lround(ut * static_cast<double>(W)), 1, canvas_w);
  const long top = uniform_int(rng, 0, canvas_h - hc);
  const long left = uniform_int(rng, 0, canvas_w - wc);

  Mat<T> out(x.rows, x.cols);
  for (long i = 0; i < F; ++i) {
    const double sy = (static_cast<double>(i) + 0.5) * hc / F - 0.5 + top;
    const long y0 = static_cast<long>(std::floor(sy));
    const T fy = static_cast<T>(sy - static_cast<double>(y0));
    for (long j = 0; j < W; ++j) {
      const double sx = (static_cast<double>(j) + 0.5) * wc / W - 0.5 + left;
      const long x0 = static_cast<long>(std::floor(sx));
      const T fx = static_cast<T>(sx - static_cast<double>(x0));
      const T v00 = detail::canvas_at(x, y0, x0, pad_r, pad_c);
      const T v01 = detail::canvas_at(x, y0, x0 + 1, pad_r, pad_c);
      const T v10 = detail::canvas_at(x, y0 + 1, x0, pad_r, pad_c);
      const T v11 = detail::canvas_at(x, y0 + 1, x0 + 1, pad_r, pad_c);
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          (T(1) - fy) * ((T(1) - fx) * v00 + fx * v01) +
          fy * ((T(1) - fx) * v10 + fx * v11);
    }
  }
  return out;
}

// Linear-in-time gain ramp, constant across frequency. Endpoints are drawn
// in dB and applied in natural-log units.
template <class T>
Mat<T> linear_fader(const Mat<T>& x, const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  const double g0 = uniform(rng, cfg.fader_db_range.first, cfg.fader_db_range.second);
  const double g1 = uniform(rng, cfg.fader_db_range.first, cfg.fader_db_range.second);
  if (g0 == 0.0 && g1 == 0.0) return x;
  constexpr double kDbToLn = std::numbers::ln10 / 20.0;
  Mat<T> out = x;
  const std::size_t W = x.cols;
  for (std::size_t j = 0; j < W; ++j) {
    const double frac = W > 1 ? static_cast<double>(j) / static_cast<double>(W - 1) : 0.0;
    const T shift = static_cast<T>((g0 + (g1 - g0) * frac) * kDbToLn);
    for (std::size_t i = 0; i < x.rows; ++i)
      out(i, j) += shift;
  }
  return out;
}

// Two independently augmented views: mixup -> random resize crop -> fader,
// each with its own draws from the shared stream.
template <class T>
std::pair<Mat<T>, Mat<T>> augment_pair(const Mat<T>& x, MixupMemory<T>& mem,
                                       const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  auto one_view = [&](void) {
    const double lambda = uniform(rng, 0.0, cfg.mixup_max_ratio);
    Mat<T> v = mixup_log(x, mem, lambda, rng);
    v = random_resize_crop(v, cfg, rng);
    return linear_fader(v, cfg, rng);
  };
  Mat<T> a = one_view();
  Mat<T> b = one_view();
  return {std::move(a), std::move(b)};
}

}  // namespace audiossl
