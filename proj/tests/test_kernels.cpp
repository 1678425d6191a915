#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "audiossl/kernels.hpp"
#include "audiossl/rng.hpp"

using namespace audiossl;

namespace {

template <class T>
std::vector<T> random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(normal(rng, 0.0, scale));
  return v;
}

template <class T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("conv3x3 forward matches serial reference", T, float, double) {
  Rng rng = make_rng(11);
  for (auto [B, Cin, Cout, H, W] :
       {std::tuple{2, 1, 4, 8, 12}, std::tuple{3, 4, 4, 5, 7}, std::tuple{1, 8, 8, 16, 24}}) {
    auto x = random_vec<T>(static_cast<std::size_t>(B) * Cin * H * W, rng);
    auto w = random_vec<T>(static_cast<std::size_t>(Cout) * Cin * 9, rng);
    auto b = random_vec<T>(static_cast<std::size_t>(Cout), rng);
    std::vector<T> y1(static_cast<std::size_t>(B) * Cout * H * W);
    std::vector<T> y2 = y1;
    kernels::conv3x3_forward(x.data(), B, Cin, H, W, w.data(), b.data(), Cout, y1.data());
    kernels::ref::conv3x3_forward(x.data(), B, Cin, H, W, w.data(), b.data(), Cout, y2.data());
    const double tol = std::is_same_v<T, float> ? 1e-4 : 1e-12;
    CHECK(max_abs_diff(y1, y2) < tol);
  }
}

TEST_CASE_TEMPLATE("conv3x3 backward matches serial reference", T, float, double) {
  Rng rng = make_rng(12);
  const int B = 2, Cin = 3, Cout = 5, H = 6, W = 9;
  auto x = random_vec<T>(static_cast<std::size_t>(B) * Cin * H * W, rng);
  auto w = random_vec<T>(static_cast<std::size_t>(Cout) * Cin * 9, rng);
  auto gy = random_vec<T>(static_cast<std::size_t>(B) * Cout * H * W, rng);

  std::vector<T> gx1(x.size()), gx2(x.size());
  kernels::conv3x3_backward_input(gy.data(), B, Cin, H, W, w.data(), Cout, gx1.data());
  kernels::ref::conv3x3_backward_input(gy.data(), B, Cin, H, W, w.data(), Cout, gx2.data());
  const double tol = std::is_same_v<T, float> ? 1e-4 : 1e-12;
  CHECK(max_abs_diff(gx1, gx2) < tol);

  std::vector<T> gw1(w.size()), gw2(w.size()), gb1(Cout), gb2(Cout);
  kernels::conv3x3_backward_weights(x.data(), gy.data(), B, Cin, H, W, Cout,
                                    gw1.data(), gb1.data());
  kernels::ref::conv3x3_backward_weights(x.data(), gy.data(), B, Cin, H, W,
                                         Cout, gw2.data(), gb2.data());
  CHECK(max_abs_diff(gw1, gw2) < tol * 10);
  CHECK(max_abs_diff(gb1, gb2) < tol * 10);
}

TEST_CASE_TEMPLATE("dense layers match serial reference", T, float, double) {
  Rng rng = make_rng(13);
  const int N = 17, In = 33, Out = 9;
  auto x = random_vec<T>(static_cast<std::size_t>(N) * In, rng);
  auto w = random_vec<T>(static_cast<std::size_t>(Out) * In, rng);
  auto b = random_vec<T>(static_cast<std::size_t>(Out), rng);
  auto gy = random_vec<T>(static_cast<std::size_t>(N) * Out, rng);
  const double tol = std::is_same_v<T, float> ? 1e-4 : 1e-12;

  std::vector<T> y1(static_cast<std::size_t>(N) * Out), y2 = y1;
  kernels::dense_forward(x.data(), N, In, w.data(), b.data(), Out, y1.data());
  kernels::ref::dense_forward(x.data(), N, In, w.data(), b.data(), Out, y2.data());
  CHECK(max_abs_diff(y1, y2) < tol);

  std::vector<T> gx1(x.size()), gx2(x.size());
  kernels::dense_backward_input(gy.data(), N, In, w.data(), Out, gx1.data());
  kernels::ref::dense_backward_input(gy.data(), N, In, w.data(), Out, gx2.data());
  CHECK(max_abs_diff(gx1, gx2) < tol);

  std::vector<T> gw1(w.size()), gw2(w.size()), gb1(Out), gb2(Out);
  kernels::dense_backward_weights(x.data(), gy.data(), N, In, Out, gw1.data(), gb1.data());
  kernels::ref::dense_backward_weights(x.data(), gy.data(), N, In, Out, gw2.data(), gb2.data());
  CHECK(max_abs_diff(gw1, gw2) < tol);
  CHECK(max_abs_diff(gb1, gb2) < tol);
}

TEST_CASE("maxpool matches reference and scatters gradients to argmax") {
  Rng rng = make_rng(14);
  const int B = 3, C = 4, H = 7, W = 10;  // odd H exercises floor truncation
  auto x = random_vec<double>(static_cast<std::size_t>(B) * C * H * W, rng);
  const int Ho = H / 2, Wo = W / 2;
  std::vector<double> y1(static_cast<std::size_t>(B) * C * Ho * Wo), y2 = y1;
  std::vector<std::uint8_t> i1(y1.size()), i2(y1.size());
  kernels::maxpool2x2_forward(x.data(), B, C, H, W, y1.data(), i1.data());
  kernels::ref::maxpool2x2_forward(x.data(), B, C, H, W, y2.data(), i2.data());
  CHECK(max_abs_diff(y1, y2) == 0.0);
  CHECK(i1 == i2);

  auto gy = random_vec<double>(y1.size(), rng);
  std::vector<double> gx(x.size());
  kernels::maxpool2x2_backward(gy.data(), i1.data(), B, C, H, W, gx.data());
  // each pooled gradient lands on exactly one input cell
  double sum_gy = 0.0, sum_gx = 0.0;
  for (double v : gy) sum_gy += v;
  for (double v : gx) sum_gx += v;
  CHECK(sum_gx == doctest::Approx(sum_gy).epsilon(1e-12));
}

TEST_CASE("cosine_condensed matches reference") {
  Rng rng = make_rng(15);
  const std::size_t n = 37, D = 19;
  auto emb = random_vec<double>(n * D, rng);
  std::vector<double> inv_norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < D; ++k) s += emb[i * D + k] * emb[i * D + k];
    inv_norms[i] = 1.0 / std::sqrt(s);
  }
  std::vector<double> d1(n * (n - 1) / 2), d2 = d1;
  kernels::cosine_condensed(emb.data(), n, D, inv_norms.data(), d1.data());
  kernels::ref::cosine_condensed(emb.data(), n, D, inv_norms.data(), d2.data());
  CHECK(max_abs_diff(d1, d2) < 1e-13);
}

TEST_CASE("parallel kernels are deterministic across repeated runs") {
  Rng rng = make_rng(16);
  const int B = 2, Cin = 8, Cout = 8, H = 16, W = 24;
  auto x = random_vec<float>(static_cast<std::size_t>(B) * Cin * H * W, rng);
  auto w = random_vec<float>(static_cast<std::size_t>(Cout) * Cin * 9, rng);
  auto b = random_vec<float>(static_cast<std::size_t>(Cout), rng);
  std::vector<float> y1(static_cast<std::size_t>(B) * Cout * H * W), y2 = y1;
  kernels::conv3x3_forward(x.data(), B, Cin, H, W, w.data(), b.data(), Cout, y1.data());
  kernels::conv3x3_forward(x.data(), B, Cin, H, W, w.data(), b.data(), Cout, y2.data());
  CHECK(y1 == y2);
}
