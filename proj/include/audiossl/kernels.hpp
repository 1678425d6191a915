#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "audiossl/error.hpp"

// Data-parallel compute kernels. Every parallel kernel assigns each output
// element to exactly one thread and accumulates it in a fixed serial order,
// so results are bit-identical for any thread count. kernels::ref holds
// naive serial versions used as oracles in tests and as the baseline in the
// benchmark tool.

namespace audiossl::kernels {

using std::size_t;

template <class T>
inline T dot_n(const T* a, const T* b, int n) {
  T acc = T(0);
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <class T>
inline void axpy_n(T alpha, const T* x, T* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// 3x3 convolution, stride 1, zero padding 1. x[B,Cin,H,W] -> y[B,Cout,H,W].
// Weights w[Cout,Cin,3,3], bias b[Cout].
// ---------------------------------------------------------------------------

template <class T>
void conv3x3_forward(const T* x, int B, int Cin, int H, int W, const T* w,
                     const T* bias, int Cout, T* y) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int oc = 0; oc < Cout; ++oc) {
      T* yp = y + (static_cast<size_t>(b) * Cout + oc) * H * W;
      const T bv = bias[oc];
      for (int i = 0; i < H * W; ++i) yp[i] = bv;
      for (int ic = 0; ic < Cin; ++ic) {
        const T* xp = x + (static_cast<size_t>(b) * Cin + ic) * H * W;
        const T* wp = w + (static_cast<size_t>(oc) * Cin + ic) * 9;
        for (int dh = 0; dh < 3; ++dh) {
          for (int dw = 0; dw < 3; ++dw) {
            const T wv = wp[dh * 3 + dw];
            const int oh0 = std::max(0, 1 - dh), oh1 = std::min(H, H + 1 - dh);
            const int ow0 = std::max(0, 1 - dw), ow1 = std::min(W, W + 1 - dw);
            const int span = ow1 - ow0;
            for (int oh = oh0; oh < oh1; ++oh) {
              const T* xrow = xp + (oh + dh - 1) * W + (ow0 + dw - 1);
              T* yrow = yp + oh * W + ow0;
              axpy_n(wv, xrow, yrow, span);
            }
          }
        }
      }
    }
  }
}

// gx[B,Cin,H,W] from gy[B,Cout,H,W]: full correlation with flipped taps.
template <class T>
void conv3x3_backward_input(const T* gy, int B, int Cin, int H, int W,
                            const T* w, int Cout, T* gx) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int ic = 0; ic < Cin; ++ic) {
      T* gxp = gx + (static_cast<size_t>(b) * Cin + ic) * H * W;
      for (int i = 0; i < H * W; ++i) gxp[i] = T(0);
      for (int oc = 0; oc < Cout; ++oc) {
        const T* gyp = gy + (static_cast<size_t>(b) * Cout + oc) * H * W;
        const T* wp = w + (static_cast<size_t>(oc) * Cin + ic) * 9;
        for (int dh = 0; dh < 3; ++dh) {
          for (int dw = 0; dw < 3; ++dw) {
            // y[oh,ow] consumed x[oh+dh-1, ow+dw-1], so x[ih,iw] feeds
            // y[ih-dh+1, iw-dw+1].
            const T wv = wp[dh * 3 + dw];
            const int ih0 = std::max(0, dh - 1), ih1 = std::min(H, H + dh - 1);
            const int iw0 = std::max(0, dw - 1), iw1 = std::min(W, W + dw - 1);
            const int span = iw1 - iw0;
            for (int ih = ih0; ih < ih1; ++ih) {
              const T* gyrow = gyp + (ih - dh + 1) * W + (iw0 - dw + 1);
              T* gxrow = gxp + ih * W + iw0;
              axpy_n(wv, gyrow, gxrow, span);
            }
          }
        }
      }
    }
  }
}

// gw[Cout,Cin,3,3] and gb[Cout] are ACCUMULATED into (callers zero first).
template <class T>
void conv3x3_backward_weights(const T* x, const T* gy, int B, int Cin, int H,
                              int W, int Cout, T* gw, T* gb) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int oc = 0; oc < Cout; ++oc) {
    for (int ic = 0; ic < Cin; ++ic) {
      T* gwp = gw + (static_cast<size_t>(oc) * Cin + ic) * 9;
      for (int dh = 0; dh < 3; ++dh) {
        for (int dw = 0; dw < 3; ++dw) {
          T acc = T(0);
          const int oh0 = std::max(0, 1 - dh), oh1 = std::min(H, H + 1 - dh);
          const int ow0 = std::max(0, 1 - dw), ow1 = std::min(W, W + 1 - dw);
          const int span = ow1 - ow0;
          for (int b = 0; b < B; ++b) {
            const T* xp = x + (static_cast<size_t>(b) * Cin + ic) * H * W;
            const T* gyp = gy + (static_cast<size_t>(b) * Cout + oc) * H * W;
            for (int oh = oh0; oh < oh1; ++oh) {
              acc += dot_n(gyp + oh * W + ow0,
                           xp + (oh + dh - 1) * W + (ow0 + dw - 1), span);
            }
          }
          gwp[dh * 3 + dw] += acc;
        }
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < Cout; ++oc) {
    T acc = T(0);
    for (int b = 0; b < B; ++b) {
      const T* gyp = gy + (static_cast<size_t>(b) * Cout + oc) * H * W;
      for (int i = 0; i < H * W; ++i) acc += gyp[i];
    }
    gb[oc] += acc;
  }
}

// ---------------------------------------------------------------------------
// Dense layer: x[N,In] w[Out,In] b[Out] -> y[N,Out].
// ---------------------------------------------------------------------------

template <class T>
void dense_forward(const T* x, int N, int In, const T* w, const T* b, int Out,
                   T* y) {
#pragma omp parallel for schedule(static)
  for (int n = 0; n < N; ++n) {
    const T* xr = x + static_cast<size_t>(n) * In;
    T* yr = y + static_cast<size_t>(n) * Out;
    for (int o = 0; o < Out; ++o) {
      yr[o] = b[o] + dot_n(xr, w + static_cast<size_t>(o) * In, In);
    }
  }
}

template <class T>
void dense_backward_input(const T* gy, int N, int In, const T* w, int Out,
                          T* gx) {
#pragma omp parallel for schedule(static)
  for (int n = 0; n < N; ++n) {
    const T* gyr = gy + static_cast<size_t>(n) * Out;
    T* gxr = gx + static_cast<size_t>(n) * In;
    for (int i = 0; i < In; ++i) gxr[i] = T(0);
    for (int o = 0; o < Out; ++o) {
      axpy_n(gyr[o], w + static_cast<size_t>(o) * In, gxr, In);
    }
  }
}

// gw[Out,In], gb[Out] accumulated into.
template <class T>
void dense_backward_weights(const T* x, const T* gy, int N, int In, int Out,
                            T* gw, T* gb) {
#pragma omp parallel for schedule(static)
  for (int o = 0; o < Out; ++o) {
    T* gwr = gw + static_cast<size_t>(o) * In;
    T gbacc = T(0);
    for (int n = 0; n < N; ++n) {
      const T g = gy[static_cast<size_t>(n) * Out + o];
      axpy_n(g, x + static_cast<size_t>(n) * In, gwr, In);
      gbacc += g;
    }
    gb[o] += gbacc;
  }
}

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2, floor on odd extents. idx records which of the
// four window cells won (row-major 0..3) for the backward scatter.
// ---------------------------------------------------------------------------

template <class T>
void maxpool2x2_forward(const T* x, int B, int C, int H, int W, T* y,
                        std::uint8_t* idx) {
  const int Ho = H / 2, Wo = W / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int c = 0; c < C; ++c) {
      const T* xp = x + (static_cast<size_t>(b) * C + c) * H * W;
      T* yp = y + (static_cast<size_t>(b) * C + c) * Ho * Wo;
      std::uint8_t* ip = idx + (static_cast<size_t>(b) * C + c) * Ho * Wo;
      for (int oh = 0; oh < Ho; ++oh) {
        for (int ow = 0; ow < Wo; ++ow) {
          const T* cell = xp + (2 * oh) * W + 2 * ow;
          T best = cell[0];
          std::uint8_t bi = 0;
          if (cell[1] > best) { best = cell[1]; bi = 1; }
          if (cell[W] > best) { best = cell[W]; bi = 2; }
          if (cell[W + 1] > best) { best = cell[W + 1]; bi = 3; }
          yp[oh * Wo + ow] = best;
          ip[oh * Wo + ow] = bi;
        }
      }
    }
  }
}

template <class T>
void maxpool2x2_backward(const T* gy, const std::uint8_t* idx, int B, int C,
                         int H, int W, T* gx) {
  const int Ho = H / 2, Wo = W / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int c = 0; c < C; ++c) {
      const T* gyp = gy + (static_cast<size_t>(b) * C + c) * Ho * Wo;
      const std::uint8_t* ip = idx + (static_cast<size_t>(b) * C + c) * Ho * Wo;
      T* gxp = gx + (static_cast<size_t>(b) * C + c) * H * W;
      for (int i = 0; i < H * W; ++i) gxp[i] = T(0);
      for (int oh = 0; oh < Ho; ++oh) {
        for (int ow = 0; ow < Wo; ++ow) {
          const std::uint8_t bi = ip[oh * Wo + ow];
          const int ih = 2 * oh + (bi >> 1);
          const int iw = 2 * ow + (bi & 1);
          gxp[ih * W + iw] = gyp[oh * Wo + ow];
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Batch normalization over x[N,C,L]; statistics per channel across N and L.
// ---------------------------------------------------------------------------

template <class T>
void bn_forward_train(const T* x, int N, int C, int L, const T* gamma,
                      const T* beta, T eps, T* y, T* mean, T* var, T* xhat,
                      T* invstd) {
  const T count = static_cast<T>(N) * static_cast<T>(L);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < C; ++c) {
    T s = T(0);
    for (int n = 0; n < N; ++n) {
      const T* xp = x + (static_cast<size_t>(n) * C + c) * L;
      for (int l = 0; l < L; ++l) s += xp[l];
    }
    const T mu = s / count;
    T sq = T(0);
    for (int n = 0; n < N; ++n) {
      const T* xp = x + (static_cast<size_t>(n) * C + c) * L;
      for (int l = 0; l < L; ++l) {
        const T d = xp[l] - mu;
        sq += d * d;
      }
    }
    const T v = sq / count;  // biased variance, matches normalization
    const T is = T(1) / std::sqrt(v + eps);
    mean[c] = mu;
    var[c] = v;
    invstd[c] = is;
    const T g = gamma[c], bt = beta[c];
    for (int n = 0; n < N; ++n) {
      const size_t off = (static_cast<size_t>(n) * C + c) * L;
      for (int l = 0; l < L; ++l) {
        const T xh = (x[off + l] - mu) * is;
        xhat[off + l] = xh;
        y[off + l] = g * xh + bt;
      }
    }
  }
}

template <class T>
void bn_forward_eval(const T* x, int N, int C, int L, const T* gamma,
                     const T* beta, const T* running_mean,
                     const T* running_var, T eps, T* y) {
#pragma omp parallel for schedule(static)
  for (int c = 0; c < C; ++c) {
    const T is = T(1) / std::sqrt(running_var[c] + eps);
    const T g = gamma[c], bt = beta[c], mu = running_mean[c];
    for (int n = 0; n < N; ++n) {
      const size_t off = (static_cast<size_t>(n) * C + c) * L;
      for (int l = 0; l < L; ++l) y[off + l] = g * (x[off + l] - mu) * is + bt;
    }
  }
}

// ggamma/gbeta accumulated into; gx overwritten.
template <class T>
void bn_backward(const T* gy, const T* xhat, const T* invstd, const T* gamma,
                 int N, int C, int L, T* gx, T* ggamma, T* gbeta) {
  const T count = static_cast<T>(N) * static_cast<T>(L);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < C; ++c) {
    T sum_gy = T(0), sum_gy_xhat = T(0);
    for (int n = 0; n < N; ++n) {
      const size_t off = (static_cast<size_t>(n) * C + c) * L;
      for (int l = 0; l < L; ++l) {
        sum_gy += gy[off + l];
        sum_gy_xhat += gy[off + l] * xhat[off + l];
      }
    }
    ggamma[c] += sum_gy_xhat;
    gbeta[c] += sum_gy;
    const T g_is_n = gamma[c] * invstd[c] / count;
    for (int n = 0; n < N; ++n) {
      const size_t off = (static_cast<size_t>(n) * C + c) * L;
      for (int l = 0; l < L; ++l) {
        gx[off + l] = g_is_n * (count * gy[off + l] - sum_gy -
                                xhat[off + l] * sum_gy_xhat);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Condensed pairwise cosine distances: emb[n,D] -> d[n(n-1)/2], pairs (i<j)
// in row-major order. Rows must have nonzero norm (checked by the caller).
// ---------------------------------------------------------------------------

inline void cosine_condensed(const double* emb, size_t n, size_t D,
                             const double* inv_norms, double* out) {
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) - 1; ++i) {
    const size_t ui = static_cast<size_t>(i);
    size_t off = ui * n - ui * (ui + 1) / 2;
    const double* ri = emb + ui * D;
    for (size_t j = ui + 1; j < n; ++j) {
      double dp = 0.0;
      const double* rj = emb + j * D;
      for (size_t k = 0; k < D; ++k) dp += ri[k] * rj[k];
      out[off + (j - ui - 1)] = 1.0 - dp * inv_norms[ui] * inv_norms[j];
    }
  }
}

// ---------------------------------------------------------------------------
// Serial reference implementations (test oracles / benchmark baselines).
// ---------------------------------------------------------------------------

namespace ref {

template <class T>
void conv3x3_forward(const T* x, int B, int Cin, int H, int W, const T* w,
                     const T* bias, int Cout, T* y) {
  for (int b = 0; b < B; ++b)
    for (int oc = 0; oc < Cout; ++oc)
      for (int oh = 0; oh < H; ++oh)
        for (int ow = 0; ow < W; ++ow) {
          T acc = bias[oc];
          for (int ic = 0; ic < Cin; ++ic)
            for (int dh = 0; dh < 3; ++dh)
              for (int dw = 0; dw < 3; ++dw) {
                const int ih = oh + dh - 1, iw = ow + dw - 1;
                if (ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
                acc += w[((static_cast<size_t>(oc) * Cin + ic) * 3 + dh) * 3 +
                         dw] *
                       x[((static_cast<size_t>(b) * Cin + ic) * H + ih) * W +
                         iw];
              }
          y[((static_cast<size_t>(b) * Cout + oc) * H + oh) * W + ow] = acc;
        }
}

template <class T>
void conv3x3_backward_input(const T* gy, int B, int Cin, int H, int W,
                            const T* w, int Cout, T* gx) {
  for (size_t i = 0; i < static_cast<size_t>(B) * Cin * H * W; ++i)
    gx[i] = T(0);
  for (int b = 0; b < B; ++b)
    for (int oc = 0; oc < Cout; ++oc)
      for (int oh = 0; oh < H; ++oh)
        for (int ow = 0; ow < W; ++ow) {
          const T g =
              gy[((static_cast<size_t>(b) * Cout + oc) * H + oh) * W + ow];
          for (int ic = 0; ic < Cin; ++ic)
            for (int dh = 0; dh < 3; ++dh)
              for (int dw = 0; dw < 3; ++dw) {
                const int ih = oh + dh - 1, iw = ow + dw - 1;
                if (ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
                gx[((static_cast<size_t>(b) * Cin + ic) * H + ih) * W + iw] +=
                    g * w[((static_cast<size_t>(oc) * Cin + ic) * 3 + dh) * 3 +
                          dw];
              }
        }
}

template <class T>
void conv3x3_backward_weights(const T* x, const T* gy, int B, int Cin, int H,
                              int W, int Cout, T* gw, T* gb) {
  for (int b = 0; b < B; ++b)
    for (int oc = 0; oc < Cout; ++oc)
      for (int oh = 0; oh < H; ++oh)
        for (int ow = 0; ow < W; ++ow) {
          const T g =
              gy[((static_cast<size_t>(b) * Cout + oc) * H + oh) * W + ow];
          gb[oc] += g;
          for (int ic = 0; ic < Cin; ++ic)
            for (int dh = 0; dh < 3; ++dh)
              for (int dw = 0; dw < 3; ++dw) {
                const int ih = oh + dh - 1, iw = ow + dw - 1;
                if (ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
                gw[((static_cast<size_t>(oc) * Cin + ic) * 3 + dh) * 3 + dw] +=
                    g * x[((static_cast<size_t>(b) * Cin + ic) * H + ih) * W +
                          iw];
              }
        }
}

template <class T>
void dense_forward(const T* x, int N, int In, const T* w, const T* b, int Out,
                   T* y) {
  for (int n = 0; n < N; ++n)
    for (int o = 0; o < Out; ++o) {
      T acc = b[o];
      for (int i = 0; i < In; ++i)
        acc += x[static_cast<size_t>(n) * In + i] *
               w[static_cast<size_t>(o) * In + i];
      y[static_cast<size_t>(n) * Out + o] = acc;
    }
}

template <class T>
void dense_backward_input(const T* gy, int N, int In, const T* w, int Out,
                          T* gx) {
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < In; ++i) {
      T acc = T(0);
      for (int o = 0; o < Out; ++o)
        acc += gy[static_cast<size_t>(n) * Out + o] *
               w[static_cast<size_t>(o) * In + i];
      gx[static_cast<size_t>(n) * In + i] = acc;
    }
}

template <class T>
void dense_backward_weights(const T* x, const T* gy, int N, int In, int Out,
                            T* gw, T* gb) {
  for (int o = 0; o < Out; ++o)
    for (int n = 0; n < N; ++n) {
      const T g = gy[static_cast<size_t>(n) * Out + o];
      for (int i = 0; i < In; ++i)
        gw[static_cast<size_t>(o) * In + i] +=
            g * x[static_cast<size_t>(n) * In + i];
    }
  for (int o = 0; o < Out; ++o) {
    T acc = T(0);
    for (int n = 0; n < N; ++n) acc += gy[static_cast<size_t>(n) * Out + o];
    gb[o] += acc;
  }
}

template <class T>
void maxpool2x2_forward(const T* x, int B, int C, int H, int W, T* y,
                        std::uint8_t* idx) {
  const int Ho = H / 2, Wo = W / 2;
  for (int b = 0; b < B; ++b)
    for (int c = 0; c < C; ++c)
      for (int oh = 0; oh < Ho; ++oh)
        for (int ow = 0; ow < Wo; ++ow) {
          T best = -std::numeric_limits<T>::infinity();
          std::uint8_t bi = 0;
          for (int dh = 0; dh < 2; ++dh)
            for (int dw = 0; dw < 2; ++dw) {
              const T v = x[((static_cast<size_t>(b) * C + c) * H + 2 * oh +
                             dh) *
                                W +
                            2 * ow + dw];
              if (v > best) {
                best = v;
                bi = static_cast<std::uint8_t>(dh * 2 + dw);
              }
            }
          const size_t o =
              ((static_cast<size_t>(b) * C + c) * Ho + oh) * Wo + ow;
          y[o] = best;
          idx[o] = bi;
        }
}

inline void cosine_condensed(const double* emb, size_t n, size_t D,
                             const double* inv_norms, double* out) {
  size_t k = 0;
  for (size_t i = 0; i + 1 < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double dp = 0.0;
      for (size_t d = 0; d < D; ++d) dp += emb[i * D + d] * emb[j * D + d];
      out[k++] = 1.0 - dp * inv_norms[i] * inv_norms[j];
    }
}

}  // namespace ref

}  // namespace audiossl::kernels
