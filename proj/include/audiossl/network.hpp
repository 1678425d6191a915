#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "audiossl/error.hpp"
#include "audiossl/kernels.hpp"
#include "audiossl/rng.hpp"
#include "audiossl/tensor.hpp"

namespace audiossl {

enum class Mode { kTrain, kEval };

// Named handle on a parameter tensor. Non-trainable entries (BN running
// statistics) are carried through checkpoints and EMA updates but skipped by
// the optimizer.
template <class T>
struct ParamRef {
  std::string name;
  Tensor<T>* value;
  Tensor<T>* grad;  // nullptr for non-trainable state
  bool trainable;
};

template <class T>
using ParamRefs = std::vector<ParamRef<T>>;

template <class T>
void zero_grads(const ParamRefs<T>& refs) {
  for (const auto& r : refs)
    if (r.grad) r.grad->zero();
}

namespace init {

// Fan-in-scaled normal init, std = sqrt(2 / fan_in).
template <class T>
void he_normal(Tensor<T>& t, std::size_t fan_in, Rng& rng) {
  const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<T>(normal(rng, 0.0, std));
}

}  // namespace init

// ---------------------------------------------------------------------------
// Layers. forward() optionally records caches for backward(); backward()
// accumulates parameter gradients (callers zero them between steps) and
// returns the input gradient.
// ---------------------------------------------------------------------------

template <class T>
struct Conv3x3 {
  int in_ch = 0, out_ch = 0;
  Tensor<T> w, b, gw, gb;
  Tensor<T> x_cache;
  bool has_cache = false;

  void init(int ic, int oc, Rng& rng) {
    in_ch = ic;
    out_ch = oc;
    w.reset({static_cast<std::size_t>(oc), static_cast<std::size_t>(ic), 3, 3});
    b.reset({static_cast<std::size_t>(oc)});
    gw.reset(w.shape().begin(), w.shape().end());
    gb.reset(b.shape().begin(), b.shape().end());
    init::he_normal(w, static_cast<std::size_t>(ic) * 9, rng);
  }

  Tensor<T> forward(const Tensor<T>& x, bool keep_cache) {
    if (x.ndim() != 4 || static_cast<int>(x.dim(1)) != in_ch)
      throw ShapeError("Conv3x3: expected [B," + std::to_string(in_ch) +
                       ",H,W] input");
    const int B = static_cast<int>(x.dim(0)), H = static_cast<int>(x.dim(2)),
              W = static_cast<int>(x.dim(3));
    Tensor<T> y({x.dim(0), static_cast<std::size_t>(out_ch), x.dim(2), x.dim(3)});
    kernels::conv3x3_forward(x.data(), B, in_ch, H, W, w.data(), b.data(),
                             out_ch, y.data());
    if (keep_cache) {
      x_cache = x;
      has_cache = true;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) throw StateError("Conv3x3: backward without forward cache");
    const int B = static_cast<int>(x_cache.dim(0)),
              H = static_cast<int>(x_cache.dim(2)),
              W = static_cast<int>(x_cache.dim(3));
    Tensor<T> gx(x_cache.shape());
    kernels::conv3x3_backward_input(gy.data(), B, in_ch, H, W, w.data(),
                                    out_ch, gx.data());
    kernels::conv3x3_backward_weights(x_cache.data(), gy.data(), B, in_ch, H,
                                      W, out_ch, gw.data(), gb.data());
    return gx;
  }

  void collect(const std::string& prefix, ParamRefs<T>& out) {
    out.push_back({prefix + ".w", &w, &gw, true});
    out.push_back({prefix + ".b", &b, &gb, true});
  }
};

template <class T>
struct BatchNorm {
  int channels = 0;
  T eps = static_cast<T>(1e-5);
  // Retention factor for running statistics; running <- momentum * running
  // + (1 - momentum) * batch.
  T momentum = static_cast<T>(0.9);
  Tensor<T> gamma, beta, g_gamma, g_beta;
  Tensor<T> running_mean, running_var;

  Tensor<T> xhat_cache, invstd_cache;
  Mode mode_cache = Mode::kTrain;
  int N_cache = 0, L_cache = 0;
  bool has_cache = false;

  void init(int c) {
    channels = c;
    const std::size_t cs = static_cast<std::size_t>(c);
    gamma.reset({cs});
    beta.reset({cs});
    g_gamma.reset({cs});
    g_beta.reset({cs});
    running_mean.reset({cs});
    running_var.reset({cs});
    gamma.fill(T(1));
    running_var.fill(T(1));
  }

  // x viewed as [N, C, L]; statistics per channel over N and L.
  Tensor<T> forward(const Tensor<T>& x, int N, int L, Mode mode,
                    bool keep_cache) {
    if (x.size() != static_cast<std::size_t>(N) * channels * L)
      throw ShapeError("BatchNorm: input size mismatch");
    if (mode == Mode::kTrain && N * L < 2)
      throw ShapeError("BatchNorm: train mode needs at least 2 values per channel");
    Tensor<T> y(x.shape());
    if (mode == Mode::kTrain) {
      Tensor<T> mean({static_cast<std::size_t>(channels)});
      Tensor<T> var({static_cast<std::size_t>(channels)});
      Tensor<T> xhat(x.shape());
      Tensor<T> invstd({static_cast<std::size_t>(channels)});
      kernels::bn_forward_train(x.data(), N, channels, L, gamma.data(),
                                beta.data(), eps, y.data(), mean.data(),
                                var.data(), xhat.data(), invstd.data());
      for (int c = 0; c < channels; ++c) {
        running_mean[static_cast<std::size_t>(c)] =
            momentum * running_mean[static_cast<std::size_t>(c)] +
            (T(1) - momentum) * mean[static_cast<std::size_t>(c)];
        running_var[static_cast<std::size_t>(c)] =
            momentum * running_var[static_cast<std::size_t>(c)] +
            (T(1) - momentum) * var[static_cast<std::size_t>(c)];
      }
      if (keep_cache) {
        xhat_cache = std::move(xhat);
        invstd_cache = std::move(invstd);
      }
    } else {
      kernels::bn_forward_eval(x.data(), N, channels, L, gamma.data(),
                               beta.data(), running_mean.data(),
                               running_var.data(), eps, y.data());
      if (keep_cache) {
        // xhat under the running statistics; backward treats them constant
        xhat_cache.reset(x.shape().begin(), x.shape().end());
        invstd_cache.reset({static_cast<std::size_t>(channels)});
        for (int c = 0; c < channels; ++c)
          invstd_cache[static_cast<std::size_t>(c)] =
              T(1) / std::sqrt(running_var[static_cast<std::size_t>(c)] + eps);
        for (int n = 0; n < N; ++n)
          for (int c = 0; c < channels; ++c) {
            const std::size_t off =
                (static_cast<std::size_t>(n) * channels + static_cast<std::size_t>(c)) *
                static_cast<std::size_t>(L);
            for (int l = 0; l < L; ++l)
              xhat_cache[off + static_cast<std::size_t>(l)] =
                  (x[off + static_cast<std::size_t>(l)] -
                   running_mean[static_cast<std::size_t>(c)]) *
                  invstd_cache[static_cast<std::size_t>(c)];
          }
      }
    }
    if (keep_cache) {
      mode_cache = mode;
      N_cache = N;
      L_cache = L;
      has_cache = true;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) throw StateError("BatchNorm: backward without forward cache");
    Tensor<T> gx(gy.shape());
    if (mode_cache == Mode::kTrain) {
      kernels::bn_backward(gy.data(), xhat_cache.data(), invstd_cache.data(),
                           gamma.data(), N_cache, channels, L_cache, gx.data(),
                           g_gamma.data(), g_beta.data());
    } else {
      // Running stats are constants: y = gamma * xhat + beta.
      for (int c = 0; c < channels; ++c) {
        T sg = T(0), sb = T(0);
        const T scale = gamma[static_cast<std::size_t>(c)] *
                        invstd_cache[static_cast<std::size_t>(c)];
        for (int n = 0; n < N_cache; ++n) {
          const std::size_t off =
              (static_cast<std::size_t>(n) * channels + static_cast<std::size_t>(c)) *
              static_cast<std::size_t>(L_cache);
          for (int l = 0; l < L_cache; ++l) {
            const std::size_t i = off + static_cast<std::size_t>(l);
            sg += gy[i] * xhat_cache[i];
            sb += gy[i];
            gx[i] = gy[i] * scale;
          }
        }
        g_gamma[static_cast<std::size_t>(c)] += sg;
        g_beta[static_cast<std::size_t>(c)] += sb;
      }
    }
    return gx;
  }

  void collect(const std::string& prefix, ParamRefs<T>& out) {
    out.push_back({prefix + ".gamma", &gamma, &g_gamma, true});
    out.push_back({prefix + ".beta", &beta, &g_beta, true});
    out.push_back({prefix + ".running_mean", &running_mean, nullptr, false});
    out.push_back({prefix + ".running_var", &running_var, nullptr, false});
  }
};

template <class T>
struct MaxPool2x2 {
  Tensor<std::uint8_t> idx;
  std::vector<std::size_t> in_shape;
  bool has_cache = false;

  Tensor<T> forward(const Tensor<T>& x, bool keep_cache) {
    const int B = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1)),
              H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    if (H < 2 || W < 2) throw ShapeError("MaxPool2x2: input too small");
    Tensor<T> y({x.dim(0), x.dim(1), x.dim(2) / 2, x.dim(3) / 2});
    Tensor<std::uint8_t> id(y.shape());
    kernels::maxpool2x2_forward(x.data(), B, C, H, W, y.data(), id.data());
    if (keep_cache) {
      idx = std::move(id);
      in_shape = x.shape();
      has_cache = true;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) throw StateError("MaxPool2x2: backward without cache");
    Tensor<T> gx(in_shape);
    kernels::maxpool2x2_backward(gy.data(), idx.data(),
                                 static_cast<int>(in_shape[0]),
                                 static_cast<int>(in_shape[1]),
                                 static_cast<int>(in_shape[2]),
                                 static_cast<int>(in_shape[3]), gx.data());
    return gx;
  }
};

template <class T>
struct Dense {
  int in_dim = 0, out_dim = 0;
  Tensor<T> w, b, gw, gb;
  Tensor<T> x_cache;
  bool has_cache = false;

  void init(int in, int out, Rng& rng) {
    in_dim = in;
    out_dim = out;
    w.reset({static_cast<std::size_t>(out), static_cast<std::size_t>(in)});
    b.reset({static_cast<std::size_t>(out)});
    gw.reset(w.shape().begin(), w.shape().end());
    gb.reset(b.shape().begin(), b.shape().end());
    init::he_normal(w, static_cast<std::size_t>(in), rng);
  }

  Tensor<T> forward(const Tensor<T>& x, bool keep_cache) {
    if (static_cast<int>(x.dim(x.ndim() - 1)) != in_dim)
      throw ShapeError("Dense: input dim mismatch");
    const int N = static_cast<int>(x.size()) / in_dim;
    Tensor<T> y({static_cast<std::size_t>(N), static_cast<std::size_t>(out_dim)});
    kernels::dense_forward(x.data(), N, in_dim, w.data(), b.data(), out_dim,
                           y.data());
    if (keep_cache) {
      x_cache = x;
      has_cache = true;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) throw StateError("Dense: backward without cache");
    const int N = static_cast<int>(x_cache.size()) / in_dim;
    Tensor<T> gx(x_cache.shape());
    kernels::dense_backward_input(gy.data(), N, in_dim, w.data(), out_dim,
                                  gx.data());
    kernels::dense_backward_weights(x_cache.data(), gy.data(), N, in_dim,
                                    out_dim, gw.data(), gb.data());
    return gx;
  }

  void collect(const std::string& prefix, ParamRefs<T>& out) {
    out.push_back({prefix + ".w", &w, &gw, true});
    out.push_back({prefix + ".b", &b, &gb, true});
  }
};

template <class T>
struct Relu {
  Tensor<T> y_cache;
  bool has_cache = false;

  Tensor<T> forward(const Tensor<T>& x, bool keep_cache) {
    Tensor<T> y(x.shape());
    const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
      y[static_cast<std::size_t>(i)] =
          x[static_cast<std::size_t>(i)] > T(0) ? x[static_cast<std::size_t>(i)] : T(0);
    if (keep_cache) {
      y_cache = y;
      has_cache = true;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) throw StateError("Relu: backward without cache");
    Tensor<T> gx(gy.shape());
    for (std::size_t i = 0; i < gy.size(); ++i)
      gx[i] = y_cache[i] > T(0) ? gy[i] : T(0);
    return gx;
  }
};

// Inverted dropout: mask drawn serially from the run's RNG so results do not
// depend on thread count.
template <class T>
struct Dropout {
  double rate = 0.0;
  Tensor<T> mask;
  bool has_cache = false;

  Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng* rng, bool keep_cache) {
    if (mode == Mode::kEval || rate <= 0.0) {
      has_cache = false;
      return x;
    }
    if (!rng) throw StateError("Dropout: train mode requires an RNG");
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    Tensor<T> m(x.shape());
    std::bernoulli_distribution keep(1.0 - rate);
    for (std::size_t i = 0; i < m.size(); ++i)
      m[i] = keep(*rng) ? scale : T(0);
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * m[i];
    if (keep_cache) {
      mask = std::move(m);
      has_cache = true;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) return gy;  // eval or rate 0: identity
    Tensor<T> gx(gy.shape());
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] = gy[i] * mask[i];
    return gx;
  }
};

// ---------------------------------------------------------------------------
// Encoder: two conv/BN/ReLU/pool blocks, per-frame MLP, temporal mean+max
// pooling. Input [B, 1, n_mels, T]; output [B, D] with D = 2*width for
// concat pooling or width for sum pooling.
// ---------------------------------------------------------------------------

struct EncoderConfig {
  int n_mels = 64;
  int channels = 64;
  int width = 256;       // MLP width W
  double dropout = 0.3;
  bool pool_concat = true;  // concat(mean, max) -> 2W; false: mean + max -> W
};

template <class T>
struct Encoder {
  EncoderConfig cfg;
  Conv3x3<T> conv1, conv2;
  BatchNorm<T> bn1, bn2;
  MaxPool2x2<T> pool1, pool2;
  Relu<T> relu1, relu2, relu3, relu4;
  Dense<T> fc1, fc2;
  Dropout<T> drop;

  // caches for the frame gather and temporal pooling
  std::vector<std::size_t> conv_out_shape;
  Tensor<std::int32_t> max_arg;
  int frames_cache = 0;
  bool has_cache = false;

  void init(const EncoderConfig& c, Rng& rng) {
    cfg = c;
    conv1.init(1, c.channels, rng);
    bn1.init(c.channels);
    conv2.init(c.channels, c.channels, rng);
    bn2.init(c.channels);
    const int feat = c.channels * (c.n_mels / 4);
    fc1.init(feat, c.width, rng);
    fc2.init(c.width, c.width, rng);
    drop.rate = c.dropout;
  }

  int embedding_dim() const {
    return cfg.pool_concat ? 2 * cfg.width : cfg.width;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng* rng,
                    bool keep_cache = true) {
    if (x.ndim() != 4 || x.dim(1) != 1 ||
        static_cast<int>(x.dim(2)) != cfg.n_mels)
      throw ShapeError("Encoder: expected [B,1," + std::to_string(cfg.n_mels) +
                       ",T] input");
    if (x.dim(3) < 4) throw ShapeError("Encoder: T must be >= 4");
    const int B = static_cast<int>(x.dim(0));
    if (mode == Mode::kTrain && B < 2)
      throw ShapeError("Encoder: train mode requires batch >= 2");

    Tensor<T> h = conv1.forward(x, keep_cache);
    h = bn1.forward(h, B, static_cast<int>(h.dim(2) * h.dim(3)), mode, keep_cache);
    h = relu1.forward(h, keep_cache);
    h = pool1.forward(h, keep_cache);
    h = conv2.forward(h, keep_cache);
    h = bn2.forward(h, B, static_cast<int>(h.dim(2) * h.dim(3)), mode, keep_cache);
    h = relu2.forward(h, keep_cache);
    h = pool2.forward(h, keep_cache);

    // gather [B, C, H2, W2] into time-major frames [B*W2, C*H2]
    const int C = static_cast<int>(h.dim(1)), H2 = static_cast<int>(h.dim(2)),
              W2 = static_cast<int>(h.dim(3));
    if (keep_cache) conv_out_shape = h.shape();
    Tensor<T> frames({static_cast<std::size_t>(B) * W2,
                      static_cast<std::size_t>(C) * H2});
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b)
      for (int t = 0; t < W2; ++t) {
        T* row = frames.data() +
                 (static_cast<std::size_t>(b) * W2 + t) *
                     (static_cast<std::size_t>(C) * H2);
        for (int c = 0; c < C; ++c)
          for (int hh = 0; hh < H2; ++hh)
            row[c * H2 + hh] = h(static_cast<std::size_t>(b),
                                 static_cast<std::size_t>(c),
                                 static_cast<std::size_t>(hh),
                                 static_cast<std::size_t>(t));
      }

    Tensor<T> f = fc1.forward(frames, keep_cache);
    f = relu3.forward(f, keep_cache);
    f = drop.forward(f, mode, rng, keep_cache);
    f = fc2.forward(f, keep_cache);
    f = relu4.forward(f, keep_cache);

    // temporal mean + max over the W2 frames of each item
    const int W_mlp = cfg.width;
    const int D = embedding_dim();
    Tensor<T> out({static_cast<std::size_t>(B), static_cast<std::size_t>(D)});
    Tensor<std::int32_t> amax({static_cast<std::size_t>(B),
                               static_cast<std::size_t>(W_mlp)});
#pragma omp parallel for schedule(static)
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < W_mlp; ++k) {
        T mean = T(0);
        T best = f(static_cast<std::size_t>(b) * W2, static_cast<std::size_t>(k));
        std::int32_t arg = 0;
        for (int t = 0; t < W2; ++t) {
          const T v = f(static_cast<std::size_t>(b) * W2 + t,
                        static_cast<std::size_t>(k));
          mean += v;
          if (v > best) {
            best = v;
            arg = t;
          }
        }
        mean /= static_cast<T>(W2);
        if (cfg.pool_concat) {
          out(static_cast<std::size_t>(b), static_cast<std::size_t>(k)) = mean;
          out(static_cast<std::size_t>(b), static_cast<std::size_t>(W_mlp + k)) = best;
        } else {
          out(static_cast<std::size_t>(b), static_cast<std::size_t>(k)) =
              mean + best;
        }
        amax(static_cast<std::size_t>(b), static_cast<std::size_t>(k)) = arg;
      }
    }
    if (keep_cache) {
      max_arg = std::move(amax);
      frames_cache = W2;
      has_cache = true;
    }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    if (!has_cache) throw StateError("Encoder: backward without forward cache");
    const int B = static_cast<int>(gy.dim(0));
    const int W_mlp = cfg.width;
    const int W2 = frames_cache;

    Tensor<T> gf({static_cast<std::size_t>(B) * W2,
                  static_cast<std::size_t>(W_mlp)});
    for (int b = 0; b < B; ++b)
      for (int k = 0; k < W_mlp; ++k) {
        const T g_mean = gy(static_cast<std::size_t>(b), static_cast<std::size_t>(k));
        const T g_max =
            cfg.pool_concat
                ? gy(static_cast<std::size_t>(b), static_cast<std::size_t>(W_mlp + k))
                : g_mean;
        const T per_frame = g_mean / static_cast<T>(W2);
        for (int t = 0; t < W2; ++t)
          gf(static_cast<std::size_t>(b) * W2 + t, static_cast<std::size_t>(k)) =
              per_frame;
        const std::int32_t arg =
            max_arg(static_cast<std::size_t>(b), static_cast<std::size_t>(k));
        gf(static_cast<std::size_t>(b) * W2 + arg, static_cast<std::size_t>(k)) +=
            g_max;
      }

    Tensor<T> g = relu4.backward(gf);
    g = fc2.backward(g);
    g = drop.backward(g);
    g = relu3.backward(g);
    g = fc1.backward(g);

    // scatter frame grads back to [B, C, H2, W2]
    const int C = static_cast<int>(conv_out_shape[1]);
    const int H2 = static_cast<int>(conv_out_shape[2]);
    Tensor<T> gh(conv_out_shape);
    for (int b = 0; b < B; ++b)
      for (int t = 0; t < W2; ++t) {
        const T* row = g.data() +
                       (static_cast<std::size_t>(b) * W2 + t) *
                           (static_cast<std::size_t>(C) * H2);
        for (int c = 0; c < C; ++c)
          for (int hh = 0; hh < H2; ++hh)
            gh(static_cast<std::size_t>(b), static_cast<std::size_t>(c),
               static_cast<std::size_t>(hh), static_cast<std::size_t>(t)) =
                row[c * H2 + hh];
      }

    g = pool2.backward(gh);
    g = relu2.backward(g);
    g = bn2.backward(g);
    g = conv2.backward(g);
    g = pool1.backward(g);
    g = relu1.backward(g);
    g = bn1.backward(g);
    return conv1.backward(g);
  }

  void collect(const std::string& prefix, ParamRefs<T>& out) {
    conv1.collect(prefix + ".conv1", out);
    bn1.collect(prefix + ".bn1", out);
    conv2.collect(prefix + ".conv2", out);
    bn2.collect(prefix + ".bn2", out);
    fc1.collect(prefix + ".fc1", out);
    fc2.collect(prefix + ".fc2", out);
  }
};

// ---------------------------------------------------------------------------
// Projection / prediction heads: dense -> BN -> ReLU -> dense.
// ---------------------------------------------------------------------------

template <class T>
struct MlpHead {
  Dense<T> d1, d2;
  BatchNorm<T> bn;
  Relu<T> relu;

  void init(int in, int hidden, int out, Rng& rng) {
    d1.init(in, hidden, rng);
    bn.init(hidden);
    d2.init(hidden, out, rng);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode, bool keep_cache = true) {
    const int N = static_cast<int>(x.dim(0));
    Tensor<T> h = d1.forward(x, keep_cache);
    h = bn.forward(h, N, 1, mode, keep_cache);
    h = relu.forward(h, keep_cache);
    return d2.forward(h, keep_cache);
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> g = d2.backward(gy);
    g = relu.backward(g);
    g = bn.backward(g);
    return d1.backward(g);
  }

  void collect(const std::string& prefix, ParamRefs<T>& out) {
    d1.collect(prefix + ".d1", out);
    bn.collect(prefix + ".bn", out);
    d2.collect(prefix + ".d2", out);
  }
};

}  // namespace audiossl
