#include "geoscale/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "geoscale/error.hpp"

namespace geoscale {

namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error::io("EmptyFile", "cannot open WAV file", path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.empty()) throw Error::io("EmptyFile", "WAV file is empty", path);
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error::io("UnsupportedFormat", "not a RIFF/WAVE file", path);

  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  const unsigned char* data = nullptr;
  uint32_t data_size = 0;

  // Chunk walk; fmt must precede data per the RIFF layout we accept.
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    uint32_t chunk_size = read_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (body + 16 > bytes.size())
        throw Error::io("UnsupportedFormat", "truncated fmt chunk", path);
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<uint32_t>(chunk_size,
                                     static_cast<uint32_t>(bytes.size() - body));
      break;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (format != 1 || bits != 16)
    throw Error::io("UnsupportedFormat",
                    "only PCM 16-bit WAV is supported", path);
  if (channels != 1 && channels != 2)
    throw Error::io("UnsupportedFormat", "only mono or stereo supported",
                    path);
  if (data == nullptr || data_size < 2 * channels)
    throw Error::io("EmptyFile", "WAV has no sample data", path);
  if (sample_rate == 0)
    throw Error::io("UnsupportedFormat", "zero sample rate", path);

  std::size_t frames = data_size / (2 * channels);
  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(sample_rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (unsigned c = 0; c < channels; ++c) {
      const unsigned char* s = data + 2 * (i * channels + c);
      int16_t v = static_cast<int16_t>(s[0] | (s[1] << 8));
      acc += static_cast<double>(v);
    }
    clip.samples[i] = acc / (32768.0 * channels);
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  if (clip.samples.empty())
    throw Error::validation("EmptyFile", "refusing to write empty clip", path);
  std::vector<unsigned char> out;
  uint32_t data_size = static_cast<uint32_t>(clip.samples.size() * 2);
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(clip.sample_rate_hz));
  put_u32(out, static_cast<uint32_t>(clip.sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);
  for (double x : clip.samples) {
    double clipped = std::clamp(x, -1.0, 1.0);
    int v = static_cast<int>(std::lrint(clipped * 32767.0));
    put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw Error::io("EmptyFile", "short write", path);
}

}  // namespace geoscale
