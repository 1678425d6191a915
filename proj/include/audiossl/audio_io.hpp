#pragma once

#include <string>
#include <vector>

#include "audiossl/error.hpp"

namespace audiossl {

// Mono audio. Samples live in [-1, 1]; ingest clips anything outside.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// Reads a RIFF/WAVE file. Supported encodings: PCM 8/16/24-bit integer and
// 32-bit IEEE float, any channel count (channels are averaged to mono).
// Throws FormatError on malformed files, UnsupportedError on other codecs.
Waveform read_wav(const std::string& path);

// Writes mono 16-bit PCM. Quantization is round(x * 32768) clamped to
// [-32768, 32767], the inverse of the read scaling, so 16-bit data
// round-trips bit-exactly.
void write_wav(const std::string& path, const Waveform& w);

// Linear-interpolation resampler. Output length = round(n * target/source).
// No anti-alias filter; adequate for the tone/noise material used here.
Waveform resample_linear(const Waveform& w, int target_rate);

// Splits into floor(duration / clip_seconds) consecutive non-overlapping
// clips; the trailing remainder is discarded.
std::vector<Waveform> segment_fixed(const Waveform& w, double clip_seconds);

}  // namespace audiossl
