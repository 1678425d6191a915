#include "audiossl/synth.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "audiossl/audio_io.hpp"
#include "audiossl/fft.hpp"
#include "audiossl/rng.hpp"

namespace audiossl {

namespace fs = std::filesystem;
using nlohmann::json;

const char* synth_kind_name(SynthKind k) {
  switch (k) {
    case SynthKind::kTone: return "tone";
    case SynthKind::kBandNoise: return "band_noise";
    case SynthKind::kAmNoise: return "am_noise";
    case SynthKind::kChirp: return "chirp";
  }
  return "?";
}

SynthKind parse_synth_kind(const std::string& s) {
  if (s == "tone") return SynthKind::kTone;
  if (s == "band_noise") return SynthKind::kBandNoise;
  if (s == "am_noise") return SynthKind::kAmNoise;
  if (s == "chirp") return SynthKind::kChirp;
  throw ValueError("unknown synth class kind: \"" + s + "\"");
}

namespace {

std::pair<double, double> json_range(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.is_array() && v.size() == 2)
    return {v[0].get<double>(), v[1].get<double>()};
  throw ValueError(std::string("synth spec: field \"") + key +
                   "\" must be a number or [lo, hi]");
}

// Band-limited noise built in the frequency domain on a power-of-two grid:
// random amplitude and phase on every bin inside the band, zero elsewhere.
// When n is itself the FFT size the band edges are exact.
std::vector<double> band_noise(std::size_t n, int sample_rate, double lo,
                               double hi, Rng& rng) {
  const std::size_t m = next_pow2(n);
  const std::size_t k_lo = static_cast<std::size_t>(
      std::ceil(lo * static_cast<double>(m) / sample_rate));
  const std::size_t k_hi = static_cast<std::size_t>(
      std::floor(hi * static_cast<double>(m) / sample_rate));
  if (k_lo > k_hi || k_hi >= m / 2)
    throw ValueError("band_noise: empty or out-of-range band [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "] Hz");
  std::vector<std::complex<double>> spec(m, {0.0, 0.0});
  for (std::size_t k = std::max<std::size_t>(k_lo, 1); k <= k_hi; ++k) {
    const double amp = uniform(rng, 0.5, 1.0);
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    spec[k] = std::polar(amp, phase);
    spec[m - k] = std::conj(spec[k]);
  }
  fft_inplace(spec, /*inverse=*/true);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = spec[i].real();
  return x;
}

void scale_to_rms(std::vector<double>& x, double target_rms) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  const double rms = std::sqrt(acc / static_cast<double>(x.size()));
  if (rms <= 0.0) return;
  const double g = target_rms / rms;
  for (double& v : x) v *= g;
}

std::vector<double> render_clip(const SynthClassSpec& cls, std::size_t n,
                                int sr, Rng& rng, SynthTruth& truth) {
  std::vector<double> x;
  const double dur = static_cast<double>(n) / sr;
  switch (cls.kind) {
    case SynthKind::kTone: {
      const double f0 = uniform(rng, cls.f0_lo, cls.f0_hi);
      const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      x.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * std::numbers::pi * f0 * i / sr + phase);
      truth.f0 = f0;
      break;
    }
    case SynthKind::kChirp: {
      const double f0 = uniform(rng, cls.f0_lo, cls.f0_hi);
      const double f1 = uniform(rng, cls.f1_lo, cls.f1_hi);
      const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      x.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sr;
        x[i] = std::sin(2.0 * std::numbers::pi *
                            (f0 * t + 0.5 * (f1 - f0) * t * t / dur) +
                        phase);
      }
      truth.f0 = f0;
      truth.f1 = f1;
      break;
    }
    case SynthKind::kBandNoise: {
      x = band_noise(n, sr, cls.band_lo, cls.band_hi, rng);
      truth.band_lo = cls.band_lo;
      truth.band_hi = cls.band_hi;
      break;
    }
    case SynthKind::kAmNoise: {
      x = band_noise(n, sr, cls.band_lo, cls.band_hi, rng);
      const double rate = uniform(rng, cls.mod_lo, cls.mod_hi);
      const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] *= 1.0 + 0.8 * std::cos(2.0 * std::numbers::pi * rate * i / sr +
                                     phase);
      }
      truth.band_lo = cls.band_lo;
      truth.band_hi = cls.band_hi;
      truth.mod_rate = rate;
      break;
    }
  }
  return x;
}

std::string csv_num(double v) {
  if (v == 0.0) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open synth spec: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError("synth spec " + path + ": invalid JSON (" + e.what() + ")");
  }
  SynthSpec spec;
  spec.name = j.value("name", spec.name);
  spec.sample_rate = j.value("sample_rate", spec.sample_rate);
  spec.clip_seconds = j.value("clip_seconds", spec.clip_seconds);
  spec.clips_per_class = j.value("clips_per_class", spec.clips_per_class);
  spec.amp_jitter_db = j.value("amp_jitter_db", spec.amp_jitter_db);
  spec.seed = j.value("seed", spec.seed);
  if (!j.contains("classes") || !j["classes"].is_array() || j["classes"].empty())
    throw ValueError("synth spec: \"classes\" must be a non-empty array");
  for (const auto& c : j["classes"]) {
    SynthClassSpec cls;
    cls.name = c.at("name").get<std::string>();
    cls.kind = parse_synth_kind(c.at("kind").get<std::string>());
    if (c.contains("f0")) std::tie(cls.f0_lo, cls.f0_hi) = json_range(c, "f0");
    if (c.contains("f1")) std::tie(cls.f1_lo, cls.f1_hi) = json_range(c, "f1");
    if (c.contains("band")) {
      std::tie(cls.band_lo, cls.band_hi) = json_range(c, "band");
    }
    if (c.contains("mod_rate"))
      std::tie(cls.mod_lo, cls.mod_hi) = json_range(c, "mod_rate");
    if (cls.f0_lo > cls.f0_hi || cls.f1_lo > cls.f1_hi ||
        cls.band_lo > cls.band_hi || cls.mod_lo > cls.mod_hi)
      throw ValueError("synth spec: class \"" + cls.name +
                       "\" has an inverted range");
    spec.classes.push_back(std::move(cls));
  }
  return spec;
}

Manifest synth_dataset(const SynthSpec& spec, const std::string& out_dir,
                       std::vector<SynthTruth>* truths_out) {
  if (spec.classes.empty()) throw ValueError("synth_dataset: no classes");
  if (spec.clips_per_class < 1)
    throw ValueError("synth_dataset: clips_per_class must be >= 1");
  const std::size_t n_samples = static_cast<std::size_t>(
      std::llround(spec.clip_seconds * spec.sample_rate));
  if (n_samples == 0) throw ValueError("synth_dataset: clip too short");

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  const std::size_t n_classes = spec.classes.size();
  const std::size_t total = n_classes * static_cast<std::size_t>(spec.clips_per_class);
  const std::size_t n_train = static_cast<std::size_t>(0.7 * static_cast<double>(total));
  const std::size_t n_val = static_cast<std::size_t>(0.15 * static_cast<double>(total));

  Manifest m;
  m.dataset_name = spec.name;
  std::vector<SynthTruth> truths;

  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto& cls = spec.classes[c];
    for (int j = 0; j < spec.clips_per_class; ++j) {
      Rng rng = make_rng(derive_seed(spec.seed, c, static_cast<std::uint64_t>(j)));
      SynthTruth truth;
      truth.label = cls.name;
      truth.kind = cls.kind;
      std::vector<double> x =
          render_clip(cls, n_samples, spec.sample_rate, rng, truth);
      scale_to_rms(x, 0.1);
      truth.gain_db = uniform(rng, -spec.amp_jitter_db, spec.amp_jitter_db);
      const double g = std::pow(10.0, truth.gain_db / 20.0);
      for (double& v : x) v *= g;

      char name[128];
      std::snprintf(name, sizeof(name), "%s_%04d.wav", cls.name.c_str(), j);
      const std::string path = (fs::path(out_dir) / "wav" / name).string();
      Waveform w;
      w.sample_rate = spec.sample_rate;
      w.samples = std::move(x);
      write_wav(path, w);
      truth.path = path;

      // 70/15/15 split by class-interleaved clip index
      const std::size_t idx = static_cast<std::size_t>(j) * n_classes + c;
      ManifestEntry e;
      e.path = path;
      e.label = cls.name;
      e.partition = idx < n_train ? Partition::kTrain
                    : idx < n_train + n_val ? Partition::kValidation
                                            : Partition::kTest;
      m.entries.push_back(std::move(e));
      truths.push_back(std::move(truth));
    }
  }

  save_manifest((fs::path(out_dir) / "manifest.jsonl").string(), m);

  std::ofstream gt(fs::path(out_dir) / "ground_truth.csv", std::ios::trunc);
  if (!gt) throw IoError("cannot write ground truth CSV in " + out_dir);
  gt << "path,label,kind,f0_hz,f1_hz,band_lo_hz,band_hi_hz,am_rate_hz,gain_db\n";
  for (const auto& t : truths) {
    char gain[32];
    std::snprintf(gain, sizeof(gain), "%.6g", t.gain_db);
    gt << t.path << ',' << t.label << ',' << synth_kind_name(t.kind) << ','
       << csv_num(t.f0) << ',' << csv_num(t.f1) << ',' << csv_num(t.band_lo)
       << ',' << csv_num(t.band_hi) << ',' << csv_num(t.mod_rate) << ','
       << gain << "\n";
  }

  if (truths_out) *truths_out = std::move(truths);
  return m;
}

}  // namespace audiossl
