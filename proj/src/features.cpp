#include "audiossl/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "audiossl/fft.hpp"

namespace audiossl {

namespace {

constexpr double kDbFloor = -120.0;

// Periodogram frames; a single zero-padded frame when the input is shorter
// than one window. Hann by default; the rectangular variant keeps a constant
// signal confined to bin 0 (used by the centroid).
std::vector<std::vector<double>> power_frames(const Waveform& w,
                                              int frame_len, int hop,
                                              bool hann = true) {
  std::vector<double> window(static_cast<std::size_t>(frame_len), 1.0);
  if (hann)
    for (int i = 0; i < frame_len; ++i)
      window[static_cast<std::size_t>(i)] =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame_len);

  const std::size_t n = w.samples.size();
  std::size_t n_frames =
      n >= static_cast<std::size_t>(frame_len)
          ? 1 + (n - static_cast<std::size_t>(frame_len)) /
                    static_cast<std::size_t>(hop)
          : 1;
  std::vector<std::vector<double>> out(n_frames);
  std::vector<double> frame(static_cast<std::size_t>(frame_len));
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t start = t * static_cast<std::size_t>(hop);
    for (int i = 0; i < frame_len; ++i) {
      const std::size_t src = start + static_cast<std::size_t>(i);
      frame[static_cast<std::size_t>(i)] =
          src < n ? w.samples[src] * window[static_cast<std::size_t>(i)] : 0.0;
    }
    out[t] = power_spectrum(frame.data(), frame.size());
  }
  return out;
}

std::vector<double> mean_power_spectrum(const Waveform& w, int frame_len,
                                        int hop) {
  const auto frames = power_frames(w, frame_len, hop);
  std::vector<double> mean(frames.front().size(), 0.0);
  for (const auto& f : frames)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += f[i];
  const double inv = 1.0 / static_cast<double>(frames.size());
  for (double& v : mean) v *= inv;
  return mean;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double erb_rate(double hz) { return 21.4 * std::log10(1.0 + 0.00437 * hz); }

double erb_rate_to_hz(double rate) {
  return (std::pow(10.0, rate / 21.4) - 1.0) / 0.00437;
}

std::vector<double> erb_band_edges(const FeatureConfig& cfg) {
  if (cfg.n_erb_bands < 2)
    throw ValueError("erb_band_edges: need at least 2 bands");
  const double r0 = erb_rate(cfg.erb_fmin), r1 = erb_rate(cfg.erb_fmax);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_erb_bands) + 1);
  for (std::size_t k = 0; k < edges.size(); ++k)
    edges[k] = erb_rate_to_hz(r0 + (r1 - r0) * static_cast<double>(k) /
                                       cfg.n_erb_bands);
  return edges;
}

double rms_level(const Waveform& w) {
  if (w.samples.empty()) throw ValueError("rms_level: empty waveform");
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  const double rms = std::sqrt(acc / static_cast<double>(w.samples.size()));
  if (rms <= 0.0) return kDbFloor;
  return std::max(20.0 * std::log10(rms), kDbFloor);
}

std::vector<double> erb_band_energies(const Waveform& w,
                                      const FeatureConfig& cfg) {
  const auto edges = erb_band_edges(cfg);
  const auto power = mean_power_spectrum(w, cfg.frame_len, cfg.hop);
  const double bin_hz =
      static_cast<double>(w.sample_rate) / cfg.frame_len;
  std::vector<double> bands(static_cast<std::size_t>(cfg.n_erb_bands), 0.0);
  for (std::size_t i = 0; i < power.size(); ++i) {
    const double f = static_cast<double>(i) * bin_hz;
    if (f < edges.front() || f > edges.back()) continue;
    // half-open bands [e_k, e_{k+1}), last band closed at the top edge
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), f) - edges.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= bands.size()) k = bands.size() - 1;
    bands[k] += power[i];
  }
  for (double& b : bands)
    b = b > 0.0 ? std::max(10.0 * std::log10(b), kDbFloor) : kDbFloor;
  return bands;
}

std::optional<double> spectral_centroid(const Waveform& w,
                                        const FeatureConfig& cfg) {
  if (w.samples.empty()) throw ValueError("spectral_centroid: empty waveform");
  const auto frames = power_frames(w, cfg.frame_len, cfg.hop, /*hann=*/false);
  const double bin_hz = static_cast<double>(w.sample_rate) / cfg.frame_len;
  double acc = 0.0;
  std::size_t n_used = 0;
  for (const auto& p : frames) {
    double e = 0.0, fw = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      e += p[i];
      fw += p[i] * static_cast<double>(i) * bin_hz;
    }
    if (e > 0.0) {
      acc += fw / e;
      ++n_used;
    }
  }
  if (n_used == 0) return std::nullopt;
  return acc / static_cast<double>(n_used);
}

double spectral_variability(const Waveform& w, const FrontendConfig& fe) {
  const Spectrogram s = logmel(w, fe);
  if (s.n_frames() < 2)
    throw LengthError("spectral_variability: need at least 2 frames");
  double acc = 0.0;
  for (std::size_t m = 0; m < s.n_mels(); ++m) {
    const double* row = s.values.row(m);
    double mu = 0.0;
    for (std::size_t t = 0; t < s.n_frames(); ++t) mu += row[t];
    mu /= static_cast<double>(s.n_frames());
    double var = 0.0;
    for (std::size_t t = 0; t < s.n_frames(); ++t) {
      const double d = row[t] - mu;
      var += d * d;
    }
    acc += std::sqrt(var / static_cast<double>(s.n_frames()));
  }
  return acc / static_cast<double>(s.n_mels());
}

std::vector<double> erb_variability(const Waveform& w,
                                    const FeatureConfig& cfg) {
  const auto edges = erb_band_edges(cfg);
  const auto frames = power_frames(w, cfg.frame_len, cfg.hop);
  if (frames.size() < 2)
    throw LengthError("erb_variability: need at least 2 frames");
  const double bin_hz = static_cast<double>(w.sample_rate) / cfg.frame_len;

  // log band power per frame
  const std::size_t n_bands = static_cast<std::size_t>(cfg.n_erb_bands);
  Mat<double> band_log(n_bands, frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    std::vector<double> bp(n_bands, 0.0);
    for (std::size_t i = 0; i < frames[t].size(); ++i) {
      const double f = static_cast<double>(i) * bin_hz;
      if (f < edges.front() || f > edges.back()) continue;
      std::size_t k = static_cast<std::size_t>(
          std::upper_bound(edges.begin(), edges.end(), f) - edges.begin());
      k = k == 0 ? 0 : k - 1;
      if (k >= n_bands) k = n_bands - 1;
      bp[k] += frames[t][i];
    }
    for (std::size_t k = 0; k < n_bands; ++k)
      band_log(k, t) = std::log(bp[k] + 1e-10);
  }

  std::vector<double> out(n_bands);
  for (std::size_t k = 0; k < n_bands; ++k) {
    const double* row = band_log.row(k);
    double mu = 0.0;
    for (std::size_t t = 0; t < frames.size(); ++t) mu += row[t];
    mu /= static_cast<double>(frames.size());
    double var = 0.0;
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const double d = row[t] - mu;
      var += d * d;
    }
    out[k] = std::sqrt(var / static_cast<double>(frames.size()));
  }
  return out;
}

std::optional<double> yin_pitch(const Waveform& w, const FeatureConfig& cfg) {
  const int sr = w.sample_rate;
  const int tau_max = static_cast<int>(std::ceil(sr / cfg.yin_fmin));
  const int tau_min = std::max(2, static_cast<int>(sr / cfg.yin_fmax));
  const std::size_t n = w.samples.size();
  if (n < 2 * static_cast<std::size_t>(tau_max))
    throw LengthError("yin_pitch: input shorter than two fmin periods");

  // Integration window: the configured frame when the signal allows it,
  // otherwise as large as the data permits (at least one fmax period more
  // than tau_max).
  const int win = std::min<std::int64_t>(
      cfg.frame_len, static_cast<std::int64_t>(n) - tau_max);
  const std::size_t block = static_cast<std::size_t>(win + tau_max);

  std::vector<double> d(static_cast<std::size_t>(tau_max) + 1);
  std::vector<double> cmnd(static_cast<std::size_t>(tau_max) + 1);
  std::vector<double> voiced_f0;
  std::size_t n_frames = 0;

  for (std::size_t start = 0; start + block <= n;
       start += static_cast<std::size_t>(cfg.yin_hop)) {
    ++n_frames;
    const double* x = w.samples.data() + start;
    d[0] = 0.0;
    for (int tau = 1; tau <= tau_max; ++tau) {
      double acc = 0.0;
      for (int j = 0; j < win; ++j) {
        const double diff = x[j] - x[j + tau];
        acc += diff * diff;
      }
      d[static_cast<std::size_t>(tau)] = acc;
    }
    // cumulative-mean-normalized difference
    cmnd[0] = 1.0;
    double running = 0.0;
    for (int tau = 1; tau <= tau_max; ++tau) {
      running += d[static_cast<std::size_t>(tau)];
      cmnd[static_cast<std::size_t>(tau)] =
          running > 0.0 ? d[static_cast<std::size_t>(tau)] * tau / running
                        : 1.0;
    }
    // first dip under the threshold, then descend to its local minimum
    int tau_hit = -1;
    for (int tau = tau_min; tau <= tau_max; ++tau) {
      if (cmnd[static_cast<std::size_t>(tau)] < cfg.yin_threshold) {
        while (tau + 1 <= tau_max &&
               cmnd[static_cast<std::size_t>(tau + 1)] <
                   cmnd[static_cast<std::size_t>(tau)]) {
          ++tau;
        }
        tau_hit = tau;
        break;
      }
    }
    if (tau_hit < 0) continue;

    double tau_refined = static_cast<double>(tau_hit);
    if (tau_hit > 1 && tau_hit < tau_max) {
      const double a = cmnd[static_cast<std::size_t>(tau_hit - 1)];
      const double b = cmnd[static_cast<std::size_t>(tau_hit)];
      const double c = cmnd[static_cast<std::size_t>(tau_hit + 1)];
      const double denom = a - 2.0 * b + c;
      if (std::abs(denom) > 1e-12) {
        const double shift = 0.5 * (a - c) / denom;
        if (std::abs(shift) <= 1.0) tau_refined += shift;
      }
    }
    const double f0 = sr / tau_refined;
    if (f0 >= cfg.yin_fmin && f0 <= cfg.yin_fmax) voiced_f0.push_back(f0);
  }

  if (n_frames == 0 ||
      static_cast<double>(voiced_f0.size()) <
          cfg.voiced_fraction * static_cast<double>(n_frames))
    return std::nullopt;
  return median(std::move(voiced_f0));
}

FeatureVector compute_features(const Waveform& w, const FeatureConfig& cfg,
                               const FrontendConfig& fe, bool include_pitch) {
  FeatureVector f;
  f.rms_db = rms_level(w);
  f.erb_energy_db = erb_band_energies(w, cfg);
  f.spectral_centroid_hz = spectral_centroid(w, cfg);
  f.spectral_variability = spectral_variability(w, fe);
  f.erb_variability = erb_variability(w, cfg);
  if (include_pitch) f.pitch_hz = yin_pitch(w, cfg);
  return f;
}

std::vector<std::string> feature_names(const FeatureConfig& cfg,
                                       bool include_pitch) {
  std::vector<std::string> names;
  names.push_back("rms_db");
  for (int k = 0; k < cfg.n_erb_bands; ++k)
    names.push_back("erb_energy_" + std::to_string(k + 1));
  names.push_back("spectral_centroid_hz");
  names.push_back("spectral_variability");
  for (int k = 0; k < cfg.n_erb_bands; ++k)
    names.push_back("erb_variability_" + std::to_string(k + 1));
  if (include_pitch) names.push_back("pitch_hz");
  return names;
}

std::vector<double> feature_values(const FeatureVector& f, bool include_pitch) {
  std::vector<double> v;
  v.push_back(f.rms_db);
  v.insert(v.end(), f.erb_energy_db.begin(), f.erb_energy_db.end());
  v.push_back(f.spectral_centroid_hz.value_or(
      std::numeric_limits<double>::quiet_NaN()));
  v.push_back(f.spectral_variability);
  v.insert(v.end(), f.erb_variability.begin(), f.erb_variability.end());
  if (include_pitch)
    v.push_back(f.pitch_hz.value_or(std::numeric_limits<double>::quiet_NaN()));
  return v;
}

}  // namespace audiossl
