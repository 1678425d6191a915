#include "audiossl/dsp.hpp"

#include <cmath>
#include <numbers>

#include "audiossl/fft.hpp"

namespace audiossl {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular filterbank [n_mels x (n_fft/2+1)], peak 1, edges equally spaced
// on the mel scale between fmin and fmax.
Mat<double> mel_filterbank(const FrontendConfig& cfg) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin), mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    edges[k] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(k) /
                                      (cfg.n_mels + 1));
  }
  Mat<double> fb(static_cast<std::size_t>(cfg.n_mels),
                 static_cast<std::size_t>(n_bins));
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double f0 = edges[m], f1 = edges[m + 1], f2 = edges[m + 2];
    for (int i = 0; i < n_bins; ++i) {
      const double f = i * bin_hz;
      double wgt = 0.0;
      if (f > f0 && f < f2) {
        wgt = f <= f1 ? (f - f0) / (f1 - f0) : (f2 - f) / (f2 - f1);
      }
      fb(static_cast<std::size_t>(m), static_cast<std::size_t>(i)) = wgt;
    }
  }
  return fb;
}

}  // namespace

std::vector<double> mel_filter_centers(const FrontendConfig& cfg) {
  const double mel_lo = hz_to_mel(cfg.fmin), mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> centers(static_cast<std::size_t>(cfg.n_mels));
  for (int m = 0; m < cfg.n_mels; ++m) {
    centers[static_cast<std::size_t>(m)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 1.0) / (cfg.n_mels + 1));
  }
  return centers;
}

Spectrogram logmel(const Waveform& w, const FrontendConfig& cfg) {
  const std::size_t n_frames = logmel_frame_count(w.samples.size(), cfg);
  if (n_frames == 0)
    throw LengthError("logmel: input shorter than one analysis window (" +
                      std::to_string(w.samples.size()) + " < " +
                      std::to_string(cfg.n_fft) + " samples)");
  const int n_bins = cfg.n_fft / 2 + 1;
  std::vector<double> window(static_cast<std::size_t>(cfg.n_fft));
  for (int i = 0; i < cfg.n_fft; ++i) {
    window[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg.n_fft);
  }
  const Mat<double> fb = mel_filterbank(cfg);

  Spectrogram s;
  s.values = Mat<double>(static_cast<std::size_t>(cfg.n_mels), n_frames);
  s.frame_hop_seconds = static_cast<double>(cfg.hop) / cfg.sample_rate;
  s.freq_low = cfg.fmin;
  s.freq_high = cfg.fmax;

#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_frames); ++t) {
    std::vector<double> frame(static_cast<std::size_t>(cfg.n_fft));
    const double* src = w.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
    for (int i = 0; i < cfg.n_fft; ++i)
      frame[static_cast<std::size_t>(i)] = src[i] * window[static_cast<std::size_t>(i)];
    const std::vector<double> power =
        power_spectrum(frame.data(), frame.size());
    for (int m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      const double* fbrow = fb.row(static_cast<std::size_t>(m));
      for (int i = 0; i < n_bins; ++i) acc += fbrow[i] * power[static_cast<std::size_t>(i)];
      s.values(static_cast<std::size_t>(m), static_cast<std::size_t>(t)) =
          std::log(acc + cfg.log_floor);
    }
  }
  return s;
}

namespace {

// Kahan-compensated accumulator; keeps pooled statistics stable regardless
// of element count.
struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

NormStats fit_norm_stats(const std::vector<Spectrogram>& specs, bool per_bin) {
  if (specs.empty())
    throw ValueError("fit_norm_stats: need at least one spectrogram");

  NormStats stats;
  stats.sample_count = specs.size();

  KahanSum total;
  std::size_t count = 0;
  for (const auto& s : specs) {
    for (double v : s.values.v) total.add(v);
    count += s.values.size();
  }
  stats.mean = total.sum / static_cast<double>(count);
  KahanSum sq;
  for (const auto& s : specs) {
    for (double v : s.values.v) {
      const double d = v - stats.mean;
      sq.add(d * d);
    }
  }
  stats.std = std::max(std::sqrt(sq.sum / static_cast<double>(count)), 1e-8);

  if (per_bin) {
    const std::size_t n_mels = specs.front().values.rows;
    for (const auto& s : specs) {
      if (s.values.rows != n_mels)
        throw ShapeError("fit_norm_stats: mixed mel-bin counts in sample");
    }
    stats.per_bin_mean.resize(n_mels);
    stats.per_bin_std.resize(n_mels);
    for (std::size_t m = 0; m < n_mels; ++m) {
      KahanSum rs;
      std::size_t rc = 0;
      for (const auto& s : specs) {
        const double* row = s.values.row(m);
        for (std::size_t t = 0; t < s.values.cols; ++t) rs.add(row[t]);
        rc += s.values.cols;
      }
      const double mu = rs.sum / static_cast<double>(rc);
      KahanSum rq;
      for (const auto& s : specs) {
        const double* row = s.values.row(m);
        for (std::size_t t = 0; t < s.values.cols; ++t) {
          const double d = row[t] - mu;
          rq.add(d * d);
        }
      }
      stats.per_bin_mean[m] = mu;
      stats.per_bin_std[m] =
          std::max(std::sqrt(rq.sum / static_cast<double>(rc)), 1e-8);
    }
  }
  return stats;
}

Spectrogram normalize(const Spectrogram& s, const NormStats& stats) {
  Spectrogram out = s;
  if (!stats.per_bin_mean.empty()) {
    if (stats.per_bin_mean.size() != s.values.rows)
      throw ShapeError("normalize: per-bin stats do not match mel-bin count");
    for (std::size_t m = 0; m < s.values.rows; ++m) {
      const double mu = stats.per_bin_mean[m];
      const double inv = 1.0 / stats.per_bin_std[m];
      double* row = out.values.row(m);
      for (std::size_t t = 0; t < s.values.cols; ++t)
        row[t] = (row[t] - mu) * inv;
    }
  } else {
    const double mu = stats.mean;
    const double inv = 1.0 / stats.std;
    for (double& v : out.values.v) v = (v - mu) * inv;
  }
  return out;
}

}  // namespace audiossl
