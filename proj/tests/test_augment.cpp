#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "audiossl/augment.hpp"
#include "audiossl/rng.hpp"

using namespace audiossl;

namespace {

Mat<double> random_mat(std::size_t r, std::size_t c, Rng& rng) {
  Mat<double> m(r, c);
  for (double& v : m.v) v = normal(rng, 0.0, 1.0);
  return m;
}

double l2_diff(const Mat<double>& a, const Mat<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

AugmentConfig noop_config() {
  AugmentConfig cfg;
  cfg.mixup_max_ratio = 0.0;
  cfg.crop_freq_scale = {1.0, 1.0};
  cfg.crop_time_scale = {1.0, 1.0};
  cfg.fader_db_range = {0.0, 0.0};
  return cfg;
}

}  // namespace

TEST_CASE("mixup_log: degenerate blends") {
  Rng rng = make_rng(61);
  MixupMemory<double> mem(8);
  Mat<double> x = random_mat(4, 6, rng);

  // empty memory: pass-through, x still remembered
  Mat<double> y0 = mixup_log(x, mem, 0.5, rng);
  CHECK(y0.v == x.v);
  CHECK(mem.size() == 1);

  Mat<double> m = random_mat(4, 6, rng);
  MixupMemory<double> mem2(8);
  mem2.push(m);

  Mat<double> same = mixup_log(x, mem2, 0.0, rng);
  CHECK(same.v == x.v);

  Mat<double> theirs = mixup_log(x, mem2, 1.0, rng);
  bool matches_a_memory_item = theirs.v == m.v || theirs.v == x.v;
  CHECK(matches_a_memory_item);

  // equal constants blend to the same constant
  Mat<double> cx(3, 3, 1.25), cm(3, 3, 1.25);
  MixupMemory<double> mem3(4);
  mem3.push(cm);
  Mat<double> blended = mixup_log(cx, mem3, 0.5, rng);
  for (double v : blended.v) CHECK(v == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("mixup_log output is exp-domain convex") {
  Rng rng = make_rng(67);
  Mat<double> x = random_mat(5, 7, rng);
  Mat<double> m = random_mat(5, 7, rng);
  MixupMemory<double> mem(2);
  mem.push(m);
  Mat<double> y = mixup_log(x, mem, 0.3, rng);
  for (std::size_t i = 0; i < y.v.size(); ++i) {
    const double lo = std::min(std::exp(x.v[i]), std::exp(m.v[i]));
    const double hi = std::max(std::exp(x.v[i]), std::exp(m.v[i]));
    const double e = std::exp(y.v[i]);
    CHECK(e >= lo - 1e-12);
    CHECK(e <= hi + 1e-12);
  }
}

TEST_CASE("mixup memory is FIFO-bounded") {
  Rng rng = make_rng(71);
  MixupMemory<double> mem(3);
  for (int i = 0; i < 10; ++i) mem.push(random_mat(2, 2, rng));
  CHECK(mem.size() == 3);
}

TEST_CASE("random_resize_crop: identity at unit scale, shape, determinism") {
  Rng rng = make_rng(73);
  Mat<double> x = random_mat(16, 24, rng);

  AugmentConfig unit = noop_config();
  Rng r1 = make_rng(1);
  Mat<double> y = random_resize_crop(x, unit, r1);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.v.size(); ++i)
    worst = std::max(worst, std::abs(y.v[i] - x.v[i]));
  CHECK(worst < 1e-6);

  AugmentConfig cfg;  // defaults with real scale ranges
  Rng r2 = make_rng(2);
  Mat<double> z = random_resize_crop(x, cfg, r2);
  CHECK(z.rows == x.rows);
  CHECK(z.cols == x.cols);
  for (double v : z.v) CHECK(std::isfinite(v));

  Rng r3 = make_rng(99), r4 = make_rng(99);
  Mat<double> a = random_resize_crop(x, cfg, r3);
  Mat<double> b = random_resize_crop(x, cfg, r4);
  CHECK(a.v == b.v);
}

TEST_CASE("linear_fader: identity, constant shift, linear ramp") {
  Rng rng = make_rng(79);
  Mat<double> x = random_mat(8, 20, rng);

  AugmentConfig zero = noop_config();
  Rng r0 = make_rng(3);
  Mat<double> same = linear_fader(x, zero, r0);
  CHECK(same.v == x.v);

  AugmentConfig six;
  six.fader_db_range = {6.0, 6.0};
  Rng r1 = make_rng(4);
  Mat<double> shifted = linear_fader(x, six, r1);
  const double expect = 6.0 * std::numbers::ln10 / 20.0;  // 0.6908
  CHECK(expect == doctest::Approx(0.6908).epsilon(1e-4));
  for (std::size_t i = 0; i < x.v.size(); ++i)
    CHECK(shifted.v[i] - x.v[i] == doctest::Approx(expect).epsilon(1e-12));

  // ramp: the per-frame shift is affine in the frame index
  AugmentConfig ramp;
  ramp.fader_db_range = {-10.0, 10.0};
  Rng r2 = make_rng(5);
  Mat<double> faded = linear_fader(x, ramp, r2);
  for (std::size_t j = 0; j + 2 < x.cols; ++j) {
    const double d0 = faded(0, j) - x(0, j);
    const double d1 = faded(0, j + 1) - x(0, j + 1);
    const double d2 = faded(0, j + 2) - x(0, j + 2);
    CHECK(std::abs((d2 - d1) - (d1 - d0)) < 1e-9);
  }
  // constant across frequency
  for (std::size_t i = 1; i < x.rows; ++i)
    CHECK(faded(i, 3) - x(i, 3) ==
          doctest::Approx(faded(0, 3) - x(0, 3)).epsilon(1e-12));
}

TEST_CASE("augment_pair: no-op config, determinism, distinct seeds differ") {
  Rng rng = make_rng(83);
  Mat<double> x = random_mat(16, 24, rng);

  AugmentConfig noop = noop_config();
  MixupMemory<double> mem(4);
  Rng r0 = make_rng(11);
  auto [a, b] = augment_pair(x, mem, noop, r0);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    worst = std::max(worst, std::abs(a.v[i] - x.v[i]));
    worst = std::max(worst, std::abs(b.v[i] - x.v[i]));
  }
  CHECK(worst < 1e-6);

  AugmentConfig cfg;
  MixupMemory<double> mem1(16), mem2(16);
  Rng r1 = make_rng(12), r2 = make_rng(12);
  auto [p1, q1] = augment_pair(x, mem1, cfg, r1);
  auto [p2, q2] = augment_pair(x, mem2, cfg, r2);
  CHECK(p1.v == p2.v);
  CHECK(q1.v == q2.v);
  CHECK(p1.rows == x.rows);
  CHECK(q1.cols == x.cols);

  int distinct = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Mat<double> input = random_mat(12, 18, rng);
    MixupMemory<double> m(16);
    Rng r = make_rng(1000 + static_cast<std::uint64_t>(trial));
    auto [v1, v2] = augment_pair(input, m, cfg, r);
    if (l2_diff(v1, v2) > 0.0) ++distinct;
    for (double v : v1.v) CHECK(std::isfinite(v));
    for (double v : v2.v) CHECK(std::isfinite(v));
  }
  CHECK(distinct == 100);
}
