#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "audiossl/features.hpp"
#include "audiossl/synth.hpp"
#include "testutil.hpp"

using namespace audiossl;

namespace {

SynthSpec two_class_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.name = "twoclass";
  spec.clips_per_class = 10;
  spec.seed = seed;
  SynthClassSpec low;
  low.name = "low_noise";
  low.kind = SynthKind::kBandNoise;
  low.band_lo = 100.0;
  low.band_hi = 900.0;
  SynthClassSpec high;
  high.name = "high_noise";
  high.kind = SynthKind::kBandNoise;
  high.band_lo = 2000.0;
  high.band_hi = 7000.0;
  spec.classes = {low, high};
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("synth_dataset: entry count and 70/15/15 split arithmetic") {
  testutil::TempDir dir("synthsplit");
  Manifest m = synth_dataset(two_class_spec(7), dir.str());
  CHECK(m.entries.size() == 20);
  auto counts = m.partition_counts();
  CHECK(counts[Partition::kTrain] == 14);
  CHECK(counts[Partition::kValidation] == 3);
  CHECK(counts[Partition::kTest] == 3);
  for (const auto& e : m.entries) {
    Waveform w = read_wav(e.path);
    CHECK(w.sample_rate == 16000);
    CHECK(w.samples.size() == 32768);
  }
  CHECK(std::ifstream(dir.str() + "/ground_truth.csv").good());
  CHECK(std::ifstream(dir.str() + "/manifest.jsonl").good());
}

TEST_CASE("synth_dataset: fixed 440 Hz tone class measures at 440 Hz") {
  testutil::TempDir dir("synthtone");
  SynthSpec spec;
  spec.name = "tones";
  spec.clips_per_class = 6;
  spec.seed = 11;
  SynthClassSpec tone;
  tone.name = "a440";
  tone.kind = SynthKind::kTone;
  tone.f0_lo = tone.f0_hi = 440.0;
  SynthClassSpec other;
  other.name = "noise";
  other.kind = SynthKind::kBandNoise;
  other.band_lo = 1000.0;
  other.band_hi = 3000.0;
  spec.classes = {tone, other};

  std::vector<SynthTruth> truths;
  synth_dataset(spec, dir.str(), &truths);
  FeatureConfig fcfg;
  for (const auto& t : truths) {
    if (t.kind != SynthKind::kTone) continue;
    CHECK(t.f0 == 440.0);
    const auto est = yin_pitch(read_wav(t.path), fcfg);
    REQUIRE(est.has_value());
    CHECK(std::abs(*est - 440.0) / 440.0 < 0.01);
  }
}

TEST_CASE("synth_dataset is byte-identical under a fixed seed") {
  testutil::TempDir d1("synthdet1"), d2("synthdet2");
  Manifest m1 = synth_dataset(two_class_spec(42), d1.str());
  Manifest m2 = synth_dataset(two_class_spec(42), d2.str());
  REQUIRE(m1.entries.size() == m2.entries.size());
  for (std::size_t i = 0; i < m1.entries.size(); ++i) {
    const std::string b1 = slurp(m1.entries[i].path);
    const std::string b2 = slurp(m2.entries[i].path);
    CHECK(b1 == b2);
    CHECK(!b1.empty());
  }
  // and different seeds differ
  testutil::TempDir d3("synthdet3");
  Manifest m3 = synth_dataset(two_class_spec(43), d3.str());
  CHECK(slurp(m1.entries[0].path) != slurp(m3.entries[0].path));
}

TEST_CASE("low/high noise classes separate by >= 20 dB in disjoint ERB bands") {
  testutil::TempDir dir("synthsep");
  std::vector<SynthTruth> truths;
  synth_dataset(two_class_spec(13), dir.str(), &truths);

  FeatureConfig fcfg;
  const auto edges = erb_band_edges(fcfg);
  // bands fully inside each generator's range
  std::vector<std::size_t> low_bands, high_bands;
  for (std::size_t k = 0; k < 20; ++k) {
    if (edges[k] >= 100.0 && edges[k + 1] <= 900.0) low_bands.push_back(k);
    if (edges[k] >= 2000.0 && edges[k + 1] <= 7000.0) high_bands.push_back(k);
  }
  REQUIRE(!low_bands.empty());
  REQUIRE(!high_bands.empty());

  for (const auto& t : truths) {
    const auto e = erb_band_energies(read_wav(t.path), fcfg);
    double own = -1e9, other = -1e9;
    const auto& own_bands = t.band_hi <= 1000.0 ? low_bands : high_bands;
    const auto& other_bands = t.band_hi <= 1000.0 ? high_bands : low_bands;
    for (std::size_t k : own_bands) own = std::max(own, e[k]);
    for (std::size_t k : other_bands) other = std::max(other, e[k]);
    CHECK(own - other >= 20.0);
  }
}

TEST_CASE("ground-truth sidecar matches measured descriptors") {
  testutil::TempDir dir("synthgt");
  SynthSpec spec;
  spec.name = "gt";
  spec.clips_per_class = 5;
  spec.seed = 17;
  SynthClassSpec tone;
  tone.name = "tone";
  tone.kind = SynthKind::kTone;
  tone.f0_lo = 300.0;
  tone.f0_hi = 900.0;
  spec.classes = {tone, tone};
  spec.classes[1].name = "tone2";

  std::vector<SynthTruth> truths;
  synth_dataset(spec, dir.str(), &truths);
  FeatureConfig fcfg;
  for (const auto& t : truths) {
    Waveform w = read_wav(t.path);
    const auto pitch = yin_pitch(w, fcfg);
    REQUIRE(pitch.has_value());
    CHECK(std::abs(*pitch - t.f0) / t.f0 < 0.01);
    const auto centroid = spectral_centroid(w, fcfg);
    REQUIRE(centroid.has_value());
    CHECK(std::abs(*centroid - t.f0) <= 16000.0 / 1024.0);
    // amplitude jitter is audible in the RMS level
    CHECK(rms_level(w) == doctest::Approx(-20.0 + t.gain_db).epsilon(0.1));
  }
}

TEST_CASE("synth spec validation") {
  testutil::TempDir dir("synthbad");
  SynthSpec empty;
  empty.classes.clear();
  CHECK_THROWS_AS(synth_dataset(empty, dir.str()), ValueError);

  const std::string path = dir.str() + "/spec.json";
  {
    std::ofstream f(path);
    f << R"({"clips_per_class": 4, "classes": [
      {"name": "t", "kind": "tone", "f0": [500, 200]}]})";
  }
  CHECK_THROWS_AS(load_synth_spec(path), ValueError);

  const std::string ok = dir.str() + "/ok.json";
  {
    std::ofstream f(ok);
    f << R"({"name": "x", "seed": 3, "clips_per_class": 2, "classes": [
      {"name": "t", "kind": "tone", "f0": 440},
      {"name": "c", "kind": "chirp", "f0": [200, 400], "f1": [2000, 3000]},
      {"name": "n", "kind": "band_noise", "band": [100, 800]},
      {"name": "a", "kind": "am_noise", "band": [500, 4000], "mod_rate": [2, 8]}]})";
  }
  SynthSpec s = load_synth_spec(ok);
  CHECK(s.classes.size() == 4);
  CHECK(s.classes[0].f0_lo == 440.0);
  CHECK(s.classes[1].kind == SynthKind::kChirp);
  testutil::TempDir out("synthok");
  Manifest m = synth_dataset(s, out.str());
  CHECK(m.entries.size() == 8);
}
