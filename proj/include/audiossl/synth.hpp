#pragma once

#include <string>
#include <vector>

#include "audiossl/manifest.hpp"

namespace audiossl {

enum class SynthKind { kTone, kBandNoise, kAmNoise, kChirp };

const char* synth_kind_name(SynthKind k);
SynthKind parse_synth_kind(const std::string& s);

struct SynthClassSpec {
  std::string name;
  SynthKind kind = SynthKind::kTone;
  double f0_lo = 440.0, f0_hi = 440.0;      // tone / chirp start
  double f1_lo = 2000.0, f1_hi = 2000.0;    // chirp end
  double band_lo = 100.0, band_hi = 900.0;  // noise band edges
  double mod_lo = 2.0, mod_hi = 8.0;        // AM rate
};

struct SynthSpec {
  std::string name = "synth";
  int sample_rate = 16000;
  double clip_seconds = 2.048;  // 32768 samples at 16 kHz: exact FFT synthesis
  int clips_per_class = 10;
  double amp_jitter_db = 6.0;
  std::uint64_t seed = 0;
  std::vector<SynthClassSpec> classes;
};

SynthSpec load_synth_spec(const std::string& path);

// Ground truth for one generated clip (CSV sidecar row).
struct SynthTruth {
  std::string path;
  std::string label;
  SynthKind kind;
  double f0 = 0.0, f1 = 0.0;       // 0 when not applicable
  double band_lo = 0.0, band_hi = 0.0;
  double mod_rate = 0.0;
  double gain_db = 0.0;
};

// Generates WAV files under out_dir/wav, writes out_dir/manifest.jsonl and
// out_dir/ground_truth.csv, and returns the manifest. The train/validation/
// test split is 70/15/15 by class-interleaved clip index. Byte-identical
// output for identical spec (including seed).
Manifest synth_dataset(const SynthSpec& spec, const std::string& out_dir,
                       std::vector<SynthTruth>* truths_out = nullptr);

}  // namespace audiossl
