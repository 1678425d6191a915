#include "audiossl/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace audiossl {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(x & 0xFF);
  v.push_back((x >> 8) & 0xFF);
  v.push_back((x >> 16) & 0xFF);
  v.push_back((x >> 24) & 0xFF);
}

void put_u16(std::vector<unsigned char>& v, std::uint16_t x) {
  v.push_back(x & 0xFF);
  v.push_back((x >> 8) & 0xFF);
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t size = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + size > bytes.size())
      throw FormatError("truncated chunk in WAV file: " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("fmt chunk too small: " + path);
      const unsigned char* p = bytes.data() + pos;
      format = read_u16(p);
      channels = read_u16(p + 2);
      sample_rate = read_u32(p + 4);
      bits = read_u16(p + 14);
      if (format == kFormatExtensible) {
        // Sub-format GUID starts with the base format code.
        if (size < 40) throw FormatError("extensible fmt chunk too small: " + path);
        format = read_u16(p + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_size = size;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr)
    throw FormatError("missing fmt or data chunk: " + path);
  if (channels == 0 || sample_rate == 0)
    throw FormatError("invalid fmt fields: " + path);
  if (format == kFormatPcm) {
    if (bits != 8 && bits != 16 && bits != 24)
      throw UnsupportedError("unsupported PCM bit depth " + std::to_string(bits) +
                             ": " + path);
  } else if (format == kFormatFloat) {
    if (bits != 32)
      throw UnsupportedError("unsupported float bit depth " +
                             std::to_string(bits) + ": " + path);
  } else {
    throw UnsupportedError("unsupported WAV codec " + std::to_string(format) +
                           ": " + path);
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_size;

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  w.samples.resize(frames);
  const double inv_channels = 1.0 / channels;
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * frame_size + c * bytes_per_sample;
      double s = 0.0;
      if (format == kFormatFloat) {
        float fv;
        std::memcpy(&fv, p, 4);
        s = fv;
      } else if (bits == 16) {
        const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        s = v / 32768.0;
      } else if (bits == 8) {
        // 8-bit WAV is unsigned with midpoint 128.
        s = (static_cast<int>(p[0]) - 128) / 128.0;
      } else {  // 24-bit
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000) v |= ~0xFFFFFF;
        s = v / 8388608.0;
      }
      acc += s;
    }
    w.samples[i] = std::clamp(acc * inv_channels, -1.0, 1.0);
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw ValueError("write_wav: sample_rate must be > 0");
  std::vector<unsigned char> out;
  out.reserve(44 + w.samples.size() * 2);
  const std::uint32_t data_size = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);
  for (double s : w.samples) {
    const double q = std::round(s * 32768.0);
    const std::int16_t v = static_cast<std::int16_t>(
        std::clamp(q, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

Waveform resample_linear(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw ValueError("resample: target_rate must be > 0");
  if (w.sample_rate <= 0) throw ValueError("resample: source rate must be > 0");
  if (target_rate == w.sample_rate) return w;
  Waveform out;
  out.sample_rate = target_rate;
  if (w.samples.empty()) return out;
  const std::size_t n = w.samples.size();
  const std::size_t m = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) * target_rate / w.sample_rate));
  out.samples.resize(m);
  const double step = static_cast<double>(w.sample_rate) / target_rate;
  for (std::size_t i = 0; i < m; ++i) {
    const double pos = std::min(i * step, static_cast<double>(n - 1));
    const std::size_t i0 = static_cast<std::size_t>(pos);
    const std::size_t i1 = std::min(i0 + 1, n - 1);
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = w.samples[i0] * (1.0 - frac) + w.samples[i1] * frac;
  }
  return out;
}

std::vector<Waveform> segment_fixed(const Waveform& w, double clip_seconds) {
  if (clip_seconds <= 0) throw ValueError("segment: clip_seconds must be > 0");
  const std::size_t clip_len = static_cast<std::size_t>(
      std::llround(clip_seconds * w.sample_rate));
  std::vector<Waveform> clips;
  if (clip_len == 0) return clips;
  const std::size_t n_clips = w.samples.size() / clip_len;
  clips.reserve(n_clips);
  for (std::size_t k = 0; k < n_clips; ++k) {
    Waveform c;
    c.sample_rate = w.sample_rate;
    c.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(k * clip_len),
                     w.samples.begin() + static_cast<std::ptrdiff_t>((k + 1) * clip_len));
    clips.push_back(std::move(c));
  }
  return clips;
}

}  // namespace audiossl
