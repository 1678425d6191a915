#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "audiossl/dsp.hpp"
#include "testutil.hpp"

using namespace audiossl;

TEST_CASE("logmel of silence is the log floor everywhere") {
  FrontendConfig cfg;
  Spectrogram s = logmel(testutil::silence(0.5, 16000), cfg);
  CHECK(s.n_mels() == 64);
  const double expect = std::log(1e-10);
  for (double v : s.values.v) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("logmel tone lands in the mel bin with the nearest center") {
  FrontendConfig cfg;
  const auto centers = mel_filter_centers(cfg);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < centers.size(); ++i)
    if (std::abs(centers[i] - 1000.0) < std::abs(centers[nearest] - 1000.0))
      nearest = i;

  Spectrogram s = logmel(testutil::sine(1000.0, 0.5, 16000, 0.5), cfg);
  for (std::size_t t = 0; t < s.n_frames(); ++t) {
    std::size_t argmax = 0;
    for (std::size_t m = 1; m < s.n_mels(); ++m)
      if (s.values(m, t) > s.values(argmax, t)) argmax = m;
    CHECK(argmax == nearest);
  }
}

TEST_CASE("doubling amplitude raises the tone bin by log(4)") {
  FrontendConfig cfg;
  Spectrogram a = logmel(testutil::sine(1000.0, 0.3, 16000, 0.25), cfg);
  Spectrogram b = logmel(testutil::sine(1000.0, 0.3, 16000, 0.5), cfg);
  // strongest bin of the first frame
  std::size_t argmax = 0;
  for (std::size_t m = 1; m < a.n_mels(); ++m)
    if (a.values(m, 0) > a.values(argmax, 0)) argmax = m;
  const double diff = b.values(argmax, 0) - a.values(argmax, 0);
  CHECK(diff == doctest::Approx(std::log(4.0)).epsilon(1e-6));
}

TEST_CASE("logmel rejects too-short input; shape is a pure length function") {
  FrontendConfig cfg;
  CHECK_THROWS_AS(logmel(testutil::silence(0.01, 16000), cfg), LengthError);

  Rng rng = make_rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto len = static_cast<std::size_t>(uniform_int(rng, 1024, 40000));
    Waveform w;
    w.sample_rate = 16000;
    w.samples.assign(len, 0.0);
    Spectrogram s = logmel(w, cfg);
    CHECK(s.n_mels() == static_cast<std::size_t>(cfg.n_mels));
    CHECK(s.n_frames() == logmel_frame_count(len, cfg));
    CHECK(s.n_frames() == 1 + (len - 1024) / 160);
  }
}

namespace {
Spectrogram make_spec(std::size_t mels, std::size_t frames, double value) {
  Spectrogram s;
  s.values = Mat<double>(mels, frames, value);
  return s;
}
}  // namespace

TEST_CASE("fit_norm_stats: degenerate variance and pooled mean") {
  auto c = make_spec(4, 5, 2.5);
  NormStats st = fit_norm_stats({c, c});
  CHECK(st.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(st.std == 1e-8);
  CHECK(st.sample_count == 2);

  NormStats st2 = fit_norm_stats({make_spec(4, 5, 0.0), make_spec(4, 5, 2.0)});
  CHECK(st2.mean == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(fit_norm_stats({}), ValueError);
}

TEST_CASE("normalize zeroes pooled statistics of a random sample") {
  Rng rng = make_rng(17);
  std::vector<Spectrogram> specs;
  for (int i = 0; i < 8; ++i) {
    Spectrogram s = make_spec(16, 40, 0.0);
    for (double& v : s.values.v) v = normal(rng, -3.0, 2.0);
    specs.push_back(std::move(s));
  }
  NormStats st = fit_norm_stats(specs);
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (const auto& s : specs) {
    Spectrogram n = normalize(s, st);
    for (double v : n.values.v) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double std = std::sqrt(sq / static_cast<double>(count) - mean * mean);
  CHECK(std::abs(mean) < 1e-6);
  CHECK(std::abs(std - 1.0) < 1e-6);
}

TEST_CASE("normalize: identity stats, centered constant, affine composition") {
  auto s = make_spec(3, 4, 1.75);
  NormStats ident{0.0, 1.0, 1, {}, {}};
  Spectrogram same = normalize(s, ident);
  for (double v : same.values.v) CHECK(v == 1.75);

  NormStats st{1.75, 2.0, 1, {}, {}};
  Spectrogram zeroed = normalize(s, st);
  for (double v : zeroed.values.v) CHECK(v == 0.0);

  // applying twice differs from once unless stats are (0,1)
  Spectrogram once = normalize(make_spec(3, 4, 5.0), st);
  Spectrogram twice = normalize(once, st);
  CHECK(once.values(0, 0) != twice.values(0, 0));
}

TEST_CASE("normalize round-trips through its inverse affine map") {
  Rng rng = make_rng(23);
  Spectrogram s = make_spec(8, 30, 0.0);
  for (double& v : s.values.v) v = normal(rng, -5.0, 3.0);
  NormStats st = fit_norm_stats({s});
  Spectrogram n = normalize(s, st);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.values.v.size(); ++i) {
    const double back = n.values.v[i] * st.std + st.mean;
    worst = std::max(worst, std::abs(back - s.values.v[i]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("per-bin stats normalize each mel row") {
  Rng rng = make_rng(29);
  std::vector<Spectrogram> specs;
  for (int i = 0; i < 4; ++i) {
    Spectrogram s = make_spec(6, 50, 0.0);
    for (std::size_t m = 0; m < 6; ++m)
      for (std::size_t t = 0; t < 50; ++t)
        s.values(m, t) = normal(rng, static_cast<double>(m), 0.5 + 0.1 * static_cast<double>(m));
    specs.push_back(std::move(s));
  }
  NormStats st = fit_norm_stats(specs, /*per_bin=*/true);
  REQUIRE(st.per_bin_mean.size() == 6);
  for (std::size_t m = 0; m < 6; ++m)
    CHECK(st.per_bin_mean[m] == doctest::Approx(static_cast<double>(m)).epsilon(0.2));
  Spectrogram n = normalize(specs[0], st);
  CHECK(n.values.rows == 6);
}
