#pragma once

#include <vector>

#include "audiossl/audio_io.hpp"
#include "audiossl/tensor.hpp"

namespace audiossl {

struct FrontendConfig {
  int sample_rate = 16000;
  int n_fft = 1024;        // 64 ms at 16 kHz, also the analysis window length
  int hop = 160;           // 10 ms
  int n_mels = 64;
  double fmin = 60.0;
  double fmax = 7800.0;
  double log_floor = 1e-10;
  bool per_bin_norm = false;  // per-mel-bin statistics instead of pooled scalars
};

// Log-mel spectrogram, [n_mels x n_frames], natural-log power.
struct Spectrogram {
  Mat<double> values;  // rows = mel bins, cols = frames
  double frame_hop_seconds = 0.0;
  double freq_low = 0.0, freq_high = 0.0;

  std::size_t n_mels() const { return values.rows; }
  std::size_t n_frames() const { return values.cols; }
};

// Dataset-level normalization statistics. Scalar mean/std pooled over all
// time-frequency elements; per-bin vectors filled only in per-bin mode.
struct NormStats {
  double mean = 0.0;
  double std = 1.0;
  std::size_t sample_count = 0;
  std::vector<double> per_bin_mean;  // empty in scalar mode
  std::vector<double> per_bin_std;
};

// Number of analysis frames for a given signal length; pure function used by
// shape tests and window arithmetic. No padding: requires len >= n_fft.
inline std::size_t logmel_frame_count(std::size_t len, const FrontendConfig& cfg) {
  if (len < static_cast<std::size_t>(cfg.n_fft)) return 0;
  return 1 + (len - static_cast<std::size_t>(cfg.n_fft)) /
                 static_cast<std::size_t>(cfg.hop);
}

// Center frequencies of the triangular mel filters (Hz).
std::vector<double> mel_filter_centers(const FrontendConfig& cfg);

// Hann-windowed STFT power -> triangular mel filterbank -> ln(power + floor).
// Throws LengthError when the waveform is shorter than one analysis window.
Spectrogram logmel(const Waveform& w, const FrontendConfig& cfg);

// Pooled mean/std over every element of the sample; std floored at 1e-8.
NormStats fit_norm_stats(const std::vector<Spectrogram>& specs,
                         bool per_bin = false);

// Elementwise (x - mean) / std.
Spectrogram normalize(const Spectrogram& s, const NormStats& stats);

}  // namespace audiossl
