#pragma once

#include <string>
#include <vector>

namespace geoscale {

// PCM audio normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Reads a RIFF/WAVE file, PCM 16-bit little-endian, mono or stereo
// (stereo is averaged to mono). Samples are scaled by 1/32768.
// Throws Error(io): UnsupportedFormat, EmptyFile.
AudioClip load_wav(const std::string& path);

// Writes a mono PCM 16-bit WAV (values clipped to [-1, 1]).
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace geoscale
