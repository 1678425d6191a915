#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "audiossl/audio_io.hpp"
#include "audiossl/rng.hpp"

namespace testutil {

inline audiossl::Waveform sine(double freq, double seconds, int sr,
                               double amp = 1.0, double phase = 0.0) {
  audiossl::Waveform w;
  w.sample_rate = sr;
  const std::size_t n = static_cast<std::size_t>(seconds * sr);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] =
        amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / sr + phase);
  return w;
}

inline audiossl::Waveform sawtooth(double freq, double seconds, int sr,
                                   double amp = 0.5) {
  audiossl::Waveform w;
  w.sample_rate = sr;
  const std::size_t n = static_cast<std::size_t>(seconds * sr);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = freq * static_cast<double>(i) / sr;
    w.samples[i] = amp * (2.0 * (t - std::floor(t)) - 1.0);
  }
  return w;
}

inline audiossl::Waveform white_noise(double seconds, int sr, audiossl::Rng& rng,
                                      double amp = 0.3) {
  audiossl::Waveform w;
  w.sample_rate = sr;
  const std::size_t n = static_cast<std::size_t>(seconds * sr);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amp * std::clamp(audiossl::normal(rng, 0.0, 0.33), -1.0, 1.0);
  return w;
}

inline audiossl::Waveform silence(double seconds, int sr) {
  audiossl::Waveform w;
  w.sample_rate = sr;
  w.samples.assign(static_cast<std::size_t>(seconds * sr), 0.0);
  return w;
}

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("audiossl_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
