#pragma once

#include <optional>
#include <string>
#include <vector>

#include "audiossl/audio_io.hpp"
#include "audiossl/dsp.hpp"

namespace audiossl {

struct FeatureConfig {
  int frame_len = 1024;  // spectral analysis window (Hann)
  int hop = 160;
  int n_erb_bands = 20;
  double erb_fmin = 50.0;
  double erb_fmax = 8000.0;
  double yin_fmin = 65.0;
  double yin_fmax = 2093.0;
  double yin_threshold = 0.1;
  int yin_hop = 256;  // 16 ms at 16 kHz
  double voiced_fraction = 0.2;
};

// Per-clip acoustic descriptors. Optional members are absent when undefined
// (all-silent input for the centroid, unvoiced input for pitch); they
// serialize as empty CSV cells.
struct FeatureVector {
  double rms_db = -120.0;
  std::vector<double> erb_energy_db;
  std::optional<double> spectral_centroid_hz;
  double spectral_variability = 0.0;
  std::vector<double> erb_variability;
  std::optional<double> pitch_hz;
};

// ERB-rate scale: 21.4 * log10(1 + 0.00437 f).
double erb_rate(double hz);
double erb_rate_to_hz(double rate);

// n_bands+1 edges equally spaced on the ERB-rate scale in [fmin, fmax].
std::vector<double> erb_band_edges(const FeatureConfig& cfg);

// 20*log10(rms), floored at -120 dBFS.
double rms_level(const Waveform& w);

// Power integrated per ERB band (frame-averaged Hann periodogram), in dB
// with a -120 floor. Requires n_erb_bands >= 2.
std::vector<double> erb_band_energies(const Waveform& w,
                                      const FeatureConfig& cfg);

// Power-weighted mean frequency per frame, averaged over frames with
// nonzero energy. nullopt when every frame is silent.
std::optional<double> spectral_centroid(const Waveform& w,
                                        const FeatureConfig& cfg);

// Std of log power across frames, per mel bin, averaged over bins.
// Requires at least 2 frames.
double spectral_variability(const Waveform& w, const FrontendConfig& fe);

// Same statistic per ERB band (std over time of log band power).
std::vector<double> erb_variability(const Waveform& w,
                                    const FeatureConfig& cfg);

// YIN fundamental frequency estimate: cumulative-mean-normalized difference,
// first dip below threshold within the [fmin, fmax] lag range, parabolic
// refinement, median over voiced frames. nullopt (UNVOICED) when fewer than
// voiced_fraction of frames yield a dip.
std::optional<double> yin_pitch(const Waveform& w, const FeatureConfig& cfg);

// Full descriptor battery. Pitch is computed only when include_pitch is set.
FeatureVector compute_features(const Waveform& w, const FeatureConfig& cfg,
                               const FrontendConfig& fe, bool include_pitch);

// Column names for the features CSV, matching compute_features layout.
std::vector<std::string> feature_names(const FeatureConfig& cfg,
                                       bool include_pitch);

// Flattens to the CSV column order; unset optionals become NaN.
std::vector<double> feature_values(const FeatureVector& f, bool include_pitch);

}  // namespace audiossl
