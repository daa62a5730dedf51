#pragma once

// Deterministic speech-like waveform for pipeline tests: a pulse train with
// pitch wander driving a cascade of formant resonators, alternating voiced
// segments, fricative-like noise bursts, and short pauses. Stands in for a
// real recording where one is not available.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "geoscale/wav.hpp"

namespace speechgen {

// Vowel-glide clip: the spectral envelope is driven by a smooth walk of two
// latent coordinates through formant space, so the frame features live on a
// (roughly) two-dimensional manifold. This is the regime the rescaling
// theory addresses when only two principal components are retained.
struct GlideShape {
  double f1_lo = 260.0;
  double f1_span = 540.0;
  double pre_lo = 0.15;
  double pre_span = 0.5;
  double f2_lo = 800.0;
  double f2_span = 880.0;
  double f3_lo = 2250.0;
  double f3_span = 350.0;
};

inline geoscale::AudioClip make_glide_clip(double duration_s,
                                           std::uint64_t seed, int rate = 8000,
                                           GlideShape shape = {}) {
  const double pi = std::numbers::pi;
  std::mt19937_64 gen(seed);
  auto uniform = [&gen]() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  };

  struct Resonator {
    double y1 = 0.0, y2 = 0.0;
    double b1 = 0.0, b2 = 0.0, a0 = 1.0;
    void tune(double f, double bw, int rate_hz) {
      double r = std::exp(-std::numbers::pi * bw / rate_hz);
      b1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * f / rate_hz);
      b2 = -r * r;
      a0 = 1.0 - r;
    }
    double step(double x) {
      double y = a0 * x + b1 * y1 + b2 * y2;
      y2 = y1;
      y1 = y;
      return y;
    }
  };

  const auto n = static_cast<std::size_t>(duration_s * rate);
  geoscale::AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.assign(n, 0.0);

  // Latent glide: incommensurate tone pairs per coordinate.
  double pu1 = 2.0 * pi * uniform(), pu2 = 2.0 * pi * uniform();
  double pv1 = 2.0 * pi * uniform(), pv2 = 2.0 * pi * uniform();

  Resonator f1, f2, f3;
  double pitch = 150.0;
  double phase = 0.0;
  double tilt_x1 = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / rate;
    double u = 0.5 + 0.325 * std::sin(2.0 * pi * 0.41 * t + pu1) +
               0.175 * std::sin(2.0 * pi * 1.117 * t + pu2);
    double v = 0.5 + 0.325 * std::sin(2.0 * pi * 0.29 * t + pv1) +
               0.175 * std::sin(2.0 * pi * 0.803 * t + pv2);

    double F1 = shape.f1_lo + shape.f1_span * u;
    double F2 = std::max(F1 + 250.0, shape.f2_lo + shape.f2_span * v);
    double F3 = shape.f3_lo + shape.f3_span * v;
    f1.tune(F1, 90.0, rate);
    f2.tune(F2, 110.0, rate);
    f3.tune(F3, 150.0, rate);

    phase += pitch / rate;
    if (phase >= 1.0) {
      phase -= 1.0;
      pitch = 150.0 * (1.0 + 0.02 * std::sin(2.0 * pi * 0.11 * t));
    }
    double excitation = std::exp(-8.0 * phase) - 0.12;
    excitation += 0.004 * (uniform() - 0.5);  // noise floor

    // Brightness tied to the first latent coordinate.
    double pre = shape.pre_lo + shape.pre_span * u;
    double shaped = excitation - pre * tilt_x1;
    tilt_x1 = excitation;

    clip.samples[i] = f3.step(f2.step(f1.step(0.65 * shaped)));
  }

  double peak = 1e-12;
  for (double s : clip.samples) peak = std::max(peak, std::abs(s));
  for (double& s : clip.samples) s *= 0.8 / peak;
  return clip;
}

inline geoscale::AudioClip make_clip(double duration_s, std::uint64_t seed,
                                     int rate = 8000) {
  const double pi = std::numbers::pi;
  std::mt19937_64 gen(seed);
  auto uniform = [&gen]() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  };

  // Vowel formant targets (Hz).
  const double vowels[][3] = {
      {730.0, 1090.0, 2440.0},  // a
      {270.0, 2290.0, 3010.0},  // i
      {300.0, 870.0, 2240.0},   // u
      {530.0, 1840.0, 2480.0},  // e
      {570.0, 840.0, 2410.0},   // o
      {660.0, 1720.0, 2410.0},  // ae
      {390.0, 1990.0, 2550.0},  // ih
  };
  const int n_vowels = 7;
  // Nasal murmurs concentrate energy near the low band edge.
  const double nasals[][3] = {
      {250.0, 1000.0, 2200.0},
      {280.0, 1150.0, 2300.0},
  };

  struct Resonator {
    double y1 = 0.0, y2 = 0.0;
    double b1 = 0.0, b2 = 0.0, a0 = 1.0;
    void tune(double f, double bw, int rate) {
      double r = std::exp(-std::numbers::pi * bw / rate);
      b1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * f / rate);
      b2 = -r * r;
      a0 = 1.0 - r;  // keeps the level roughly independent of tuning
    }
    double step(double x) {
      double y = a0 * x + b1 * y1 + b2 * y2;
      y2 = y1;
      y1 = y;
      return y;
    }
  };

  const auto n = static_cast<std::size_t>(duration_s * rate);
  geoscale::AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.assign(n, 0.0);

  Resonator f1, f2, f3;
  double cur[3] = {500.0, 1500.0, 2500.0};
  double tgt[3] = {500.0, 1500.0, 2500.0};

  double pitch = 110.0 + 30.0 * uniform();
  double phase = 0.0;
  double seg_left = 0.0;
  int seg_type = 0;  // 0 voiced, 1 noise, 2 pause
  double level = 0.0, level_tgt = 0.0;
  // Per-segment spectral tilt: positive = pre-emphasis (bright), negative
  // = one-pole de-emphasis (dark). Varying the tilt moves energy in and
  // out of the band edges, so a fixed channel filter displaces frames by
  // different amounts.
  double tilt = 0.0;
  double tilt_x1 = 0.0, tilt_y1 = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    if (seg_left <= 0.0) {
      double u = uniform();
      if (u < 0.55) {
        seg_type = 0;
        const double* v = vowels[gen() % n_vowels];
        tgt[0] = v[0] * (0.94 + 0.12 * uniform());
        tgt[1] = v[1] * (0.94 + 0.12 * uniform());
        tgt[2] = v[2] * (0.94 + 0.12 * uniform());
        seg_left = 0.09 + 0.16 * uniform();
        level_tgt = 0.62 + 0.08 * uniform();
        pitch = 95.0 + 50.0 * uniform();
      } else if (u < 0.72) {
        seg_type = 0;  // nasal murmur, voiced
        const double* v = nasals[gen() % 2];
        tgt[0] = v[0] * (0.94 + 0.12 * uniform());
        tgt[1] = v[1] * (0.94 + 0.12 * uniform());
        tgt[2] = v[2] * (0.94 + 0.12 * uniform());
        seg_left = 0.07 + 0.1 * uniform();
        level_tgt = 0.5 + 0.08 * uniform();
      } else {
        seg_type = 1;  // fricative-ish: high broad resonance
        tgt[0] = 1400.0 + 600.0 * uniform();
        tgt[1] = 2300.0 + 700.0 * uniform();
        tgt[2] = 3100.0 + 400.0 * uniform();
        seg_left = 0.05 + 0.08 * uniform();
        level_tgt = 0.3 + 0.08 * uniform();
      }
      tilt = -0.5 + 1.3 * uniform();
    }
    seg_left -= 1.0 / rate;

    // Smooth formant and level glides.
    const double glide = 1.0 / (0.030 * rate);
    for (int k = 0; k < 3; ++k) cur[k] += (tgt[k] - cur[k]) * glide;
    level += (level_tgt - level) * glide;
    f1.tune(cur[0], 90.0, rate);
    f2.tune(cur[1], 110.0, rate);
    f3.tune(cur[2], 150.0, rate);

    // Background noise floor, as any real microphone has.
    double excitation = 0.01 * (uniform() - 0.5);
    if (seg_type == 0) {
      phase += pitch / rate;
      if (phase >= 1.0) {
        phase -= 1.0;
        pitch *= 1.0 + 0.01 * (uniform() - 0.5);
      }
      // Sharp decaying pulse once per period.
      excitation += std::exp(-8.0 * phase) - 0.12;
    } else if (seg_type == 1) {
      excitation += 1.2 * (uniform() - 0.5);
    }
    if (tilt >= 0.0) {
      double shaped = excitation - tilt * tilt_x1;  // pre-emphasis
      tilt_x1 = excitation;
      excitation = shaped;
    } else {
      tilt_y1 = (1.0 + tilt) * excitation - tilt * tilt_y1;  // de-emphasis
      tilt_x1 = excitation;
      excitation = tilt_y1;
    }
    double y = f3.step(f2.step(f1.step(level * excitation)));
    clip.samples[i] = y;
  }

  // Normalize to 0.8 peak.
  double peak = 1e-12;
  for (double v : clip.samples) peak = std::max(peak, std::abs(v));
  for (double& v : clip.samples) v *= 0.8 / peak;
  return clip;
}

}  // namespace speechgen
