#ifndef LATENTLENS_WAV_HPP
#define LATENTLENS_WAV_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "latentlens/errors.hpp"

namespace latentlens {

struct AudioBuffer {
  std::vector<double> samples;  // mono, in [-1, 1]
  unsigned sample_rate_hz = 0;

  double duration_s() const {
    return double(samples.size()) / double(sample_rate_hz);
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
inline std::uint16_t read_u16le(const unsigned char* p) {
  return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}

}  // namespace detail

// RIFF/WAVE, PCM 16-bit, mono or stereo. Stereo is averaged to mono;
// samples are scaled by 1/32768.
inline AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError("not a RIFF/WAVE file: " + path.string());

  unsigned channels = 0, bits = 0;
  unsigned rate = 0;
  std::uint16_t audio_format = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* tag = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t len = detail::read_u32le(bytes.data() + pos + 4);
    if (pos + 8 + len > bytes.size()) throw ParseError("truncated chunk in " + path.string());
    const unsigned char* body = bytes.data() + pos + 8;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (len < 16) throw ParseError("short fmt chunk");
      audio_format = detail::read_u16le(body);
      channels = detail::read_u16le(body + 2);
      rate = detail::read_u32le(body + 4);
      bits = detail::read_u16le(body + 14);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = body;
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }

  if (audio_format != 1) throw UnsupportedFormat("only PCM supported");
  if (bits != 16) throw UnsupportedFormat("only 16-bit samples supported");
  if (channels != 1 && channels != 2) throw UnsupportedFormat("only mono/stereo supported");
  if (!data || rate == 0) throw ParseError("missing fmt or data chunk");
  if (data_len % (2 * channels) != 0) throw ParseError("truncated sample data");

  AudioBuffer buf;
  buf.sample_rate_hz = rate;
  const std::size_t frames = data_len / (2 * channels);
  buf.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (unsigned c = 0; c < channels; ++c) {
      const unsigned char* p = data + 2 * (i * channels + c);
      const std::int16_t s = std::int16_t(detail::read_u16le(p));
      acc += double(s) / 32768.0;
    }
    buf.samples[i] = acc / double(channels);
  }
  return buf;
}

// PCM-16 mono writer, used by tests and the synthetic-corpus helpers.
inline void write_wav(const std::filesystem::path& path,
                      const std::vector<double>& samples, unsigned rate,
                      unsigned channels = 1) {
  std::ofstream out(path, std::ios::binary);
  const std::uint32_t data_len = std::uint32_t(samples.size() * 2);
  auto put_u32 = [&](std::uint32_t v) {
    char b[4] = {char(v & 0xff), char(v >> 8 & 0xff), char(v >> 16 & 0xff), char(v >> 24 & 0xff)};
    out.write(b, 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    char b[2] = {char(v & 0xff), char(v >> 8 & 0xff)};
    out.write(b, 2);
  };
  out.write("RIFF", 4);
  put_u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);                   // PCM
  put_u16(std::uint16_t(channels));
  put_u32(rate);
  put_u32(rate * 2 * channels); // byte rate
  put_u16(std::uint16_t(2 * channels));
  put_u16(16);
  out.write("data", 4);
  put_u32(data_len);
  for (double s : samples) {
    double clipped = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
    auto v = std::int16_t(std::lround(clipped * 32767.0));
    put_u16(std::uint16_t(v));
  }
}

}  // namespace latentlens

#endif
