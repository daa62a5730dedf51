#pragma once

#include <Eigen/Core>

#include "geoscale/trajectory.hpp"
#include "geoscale/types.hpp"
#include "geoscale/wav.hpp"

namespace geoscale {

// Frame-by-frame short-term magnitude spectra. frames is T x B with
// B = window_samples/2 + 1 bins spaced bin_width_hz apart starting at 0 Hz.
struct Spectrogram {
  RowMatrixXd frames;
  double window_s = 0.0;
  double hop_s = 0.0;
  double bin_width_hz = 0.0;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index num_bins() const { return frames.cols(); }
  double nyquist_hz() const { return bin_width_hz * (frames.cols() - 1); }
  // Center time of frame i.
  double frame_time(Eigen::Index i) const {
    return i * hop_s + window_s / 2.0;
  }
};

struct CepstraConfig {
  double window_ms = 16.0;
  double hop_ms = 4.0;
  double smoothing_width_hz = 800.0;
  int n_cepstra = 53;
  double log_floor = 1e-10;

  void validate() const;
};

// Hamming-windowed magnitude STFT. Frame count is
// floor((len - window)/hop) + 1. Throws Error(validation): ClipTooShort.
Spectrogram stft(const AudioClip& clip, const CepstraConfig& cfg);

// Band-edge attenuation simulating a transmission channel: Hamming-shaped
// ramps over [0, low_edge] and [high_edge, nyquist], unity in between.
struct ChannelFilterSpec {
  double low_edge_hz = 500.0;    // end of the low roll-off
  double high_edge_hz = 3500.0;  // start of the high roll-off
  double rolloff_hz = 500.0;
  double nyquist_hz = 4000.0;

  double gain(double f_hz) const;
  void validate() const;
};

// Multiplies each bin by gain(f). Throws Error(validation): BandOutOfRange
// when the spectrogram does not cover the filter bands.
Spectrogram apply_channel_filter(const Spectrogram& spec,
                                 const ChannelFilterSpec& filt);

// Smoothed log-magnitude cepstra: moving average of width smoothing_width_hz
// (edge-truncated), log with floor, orthonormal DCT-II, first n_cepstra
// coefficients kept. Times are frame centers.
// Throws Error(validation): ConfigMismatch.
FeatureTrajectory cepstra(const Spectrogram& spec, const CepstraConfig& cfg);

// Orthonormal DCT-II of a vector (exposed for tests and reconstruction).
Eigen::VectorXd dct_ii_orthonormal(const Eigen::VectorXd& x);
Eigen::VectorXd idct_ii_orthonormal(const Eigen::VectorXd& coeffs);

}  // namespace geoscale
