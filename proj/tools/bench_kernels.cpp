// Benchmark: OpenMP kernels vs the serial reference implementations.
// Prints per-kernel timings and the speedup; sizes follow the encoder's hot
// shapes.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "audiossl/kernels.hpp"
#include "audiossl/rng.hpp"

using namespace audiossl;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(F&& fn, int reps) {
  // warm-up
  fn();
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

std::vector<float> randf(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(normal(rng, 0.0, 1.0));
  return v;
}

void report(const char* name, double serial_ms, double omp_ms, double gflop) {
  std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %6.2f GFLOP/s\n",
              name, serial_ms, omp_ms, serial_ms / omp_ms, gflop / (omp_ms * 1e-3) * 1e-9);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  Rng rng = make_rng(1234);

  {
    const int B = 16, Cin = 64, Cout = 64, H = 32, W = 48;
    auto x = randf(static_cast<std::size_t>(B) * Cin * H * W, rng);
    auto w = randf(static_cast<std::size_t>(Cout) * Cin * 9, rng);
    auto b = randf(Cout, rng);
    std::vector<float> y(static_cast<std::size_t>(B) * Cout * H * W);
    const double flop = 2.0 * B * Cout * H * W * Cin * 9;
    const double s = time_ms([&] {
      kernels::ref::conv3x3_forward(x.data(), B, Cin, H, W, w.data(), b.data(), Cout, y.data());
    }, 2);
    const double p = time_ms([&] {
      kernels::conv3x3_forward(x.data(), B, Cin, H, W, w.data(), b.data(), Cout, y.data());
    }, 6);
    report("conv3x3_forward", s, p, flop);

    std::vector<float> gx(x.size());
    const double sbi = time_ms([&] {
      kernels::ref::conv3x3_backward_input(y.data(), B, Cin, H, W, w.data(), Cout, gx.data());
    }, 2);
    const double pbi = time_ms([&] {
      kernels::conv3x3_backward_input(y.data(), B, Cin, H, W, w.data(), Cout, gx.data());
    }, 6);
    report("conv3x3_backward_input", sbi, pbi, flop);

    std::vector<float> gw(w.size()), gb(Cout);
    const double sbw = time_ms([&] {
      kernels::ref::conv3x3_backward_weights(x.data(), y.data(), B, Cin, H, W, Cout, gw.data(), gb.data());
    }, 2);
    const double pbw = time_ms([&] {
      kernels::conv3x3_backward_weights(x.data(), y.data(), B, Cin, H, W, Cout, gw.data(), gb.data());
    }, 6);
    report("conv3x3_backward_weights", sbw, pbw, flop);
  }

  {
    const int N = 384, In = 1024, Out = 256;
    auto x = randf(static_cast<std::size_t>(N) * In, rng);
    auto w = randf(static_cast<std::size_t>(Out) * In, rng);
    auto b = randf(Out, rng);
    std::vector<float> y(static_cast<std::size_t>(N) * Out);
    const double flop = 2.0 * N * In * Out;
    const double s = time_ms([&] {
      kernels::ref::dense_forward(x.data(), N, In, w.data(), b.data(), Out, y.data());
    }, 3);
    const double p = time_ms([&] {
      kernels::dense_forward(x.data(), N, In, w.data(), b.data(), Out, y.data());
    }, 10);
    report("dense_forward", s, p, flop);
  }

  {
    const std::size_t n = 600, D = 512;
    std::vector<double> emb(n * D);
    for (auto& v : emb) v = normal(rng, 0.0, 1.0);
    std::vector<double> inv_norms(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < D; ++k) acc += emb[i * D + k] * emb[i * D + k];
      inv_norms[i] = 1.0 / std::sqrt(acc);
    }
    std::vector<double> out(n * (n - 1) / 2);
    const double flop = 2.0 * static_cast<double>(out.size()) * D;
    const double s = time_ms([&] {
      kernels::ref::cosine_condensed(emb.data(), n, D, inv_norms.data(), out.data());
    }, 3);
    const double p = time_ms([&] {
      kernels::cosine_condensed(emb.data(), n, D, inv_norms.data(), out.data());
    }, 10);
    report("cosine_condensed", s, p, flop);
  }

  return 0;
}
