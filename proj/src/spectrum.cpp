#include "geoscale/spectrum.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "geoscale/error.hpp"
#include "geoscale/kernels.hpp"

namespace geoscale {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> hamming_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));
  return w;
}

}  // namespace

void CepstraConfig::validate() const {
  if (window_ms <= 0 || hop_ms <= 0 || smoothing_width_hz <= 0 ||
      n_cepstra <= 0 || log_floor <= 0)
    throw Error::validation("ConfigMismatch",
                            "cepstra settings must be positive");
}

Spectrogram stft(const AudioClip& clip, const CepstraConfig& cfg) {
  cfg.validate();
  if (clip.samples.empty() || clip.sample_rate_hz <= 0)
    throw Error::validation("ClipTooShort", "empty clip");
  const int rate = clip.sample_rate_hz;
  const int window = static_cast<int>(std::lround(cfg.window_ms * rate / 1000.0));
  const int hop = static_cast<int>(std::lround(cfg.hop_ms * rate / 1000.0));
  if (window < 2 || hop < 1)
    throw Error::validation("ConfigMismatch", "window/hop too small for rate");
  const auto len = static_cast<long>(clip.samples.size());
  if (len < window)
    throw Error::validation("ClipTooShort",
                            "clip shorter than one analysis window");

  const long num_frames = (len - window) / hop + 1;
  const int bins = window / 2 + 1;
  const auto win = hamming_window(window);

  // Precomputed DFT basis rows; each magnitude bin is two dot products.
  RowMatrixXd cos_table(bins, window);
  RowMatrixXd sin_table(bins, window);
  for (int k = 0; k < bins; ++k)
    for (int n = 0; n < window; ++n) {
      double phase = 2.0 * kPi * k * n / window;
      cos_table(k, n) = std::cos(phase);
      sin_table(k, n) = -std::sin(phase);
    }

  Spectrogram spec;
  spec.window_s = static_cast<double>(window) / rate;
  spec.hop_s = static_cast<double>(hop) / rate;
  spec.bin_width_hz = static_cast<double>(rate) / window;
  spec.frames.resize(num_frames, bins);

  std::vector<double> frame(static_cast<std::size_t>(window));
  for (long t = 0; t < num_frames; ++t) {
    const double* src = clip.samples.data() + t * hop;
    for (int n = 0; n < window; ++n)
      frame[static_cast<std::size_t>(n)] = src[n] * win[static_cast<std::size_t>(n)];
    for (int k = 0; k < bins; ++k) {
      double re = kernels::dot(frame.data(), cos_table.row(k).data(),
                               static_cast<std::size_t>(window));
      double im = kernels::dot(frame.data(), sin_table.row(k).data(),
                               static_cast<std::size_t>(window));
      spec.frames(t, k) = std::hypot(re, im);
    }
  }
  return spec;
}

double ChannelFilterSpec::gain(double f_hz) const {
  if (f_hz <= low_edge_hz)
    return 0.54 - 0.46 * std::cos(kPi * f_hz / rolloff_hz);
  if (f_hz >= high_edge_hz)
    return 0.54 - 0.46 * std::cos(kPi * (nyquist_hz - f_hz) / rolloff_hz);
  return 1.0;
}

void ChannelFilterSpec::validate() const {
  if (!(rolloff_hz > 0) || !(low_edge_hz >= 0) ||
      !(high_edge_hz > low_edge_hz) || !(nyquist_hz >= high_edge_hz))
    throw Error::validation("BandOutOfRange", "filter bands misordered");
}

Spectrogram apply_channel_filter(const Spectrogram& spec,
                                 const ChannelFilterSpec& filt) {
  filt.validate();
  if (spec.nyquist_hz() + 1e-9 < filt.nyquist_hz)
    throw Error::validation(
        "BandOutOfRange",
        "spectrogram does not cover the filter band up to nyquist");
  Spectrogram out = spec;
  for (Eigen::Index k = 0; k < spec.num_bins(); ++k) {
    double g = filt.gain(k * spec.bin_width_hz);
    out.frames.col(k) *= g;
  }
  return out;
}

namespace {

// Row-major DCT-II basis with orthonormal scaling; cached per size.
const RowMatrixXd& dct_basis(Eigen::Index n) {
  static std::mutex mu;
  static std::map<Eigen::Index, RowMatrixXd> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    RowMatrixXd basis(n, n);
    const double s0 = std::sqrt(1.0 / n);
    const double sk = std::sqrt(2.0 / n);
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index i = 0; i < n; ++i)
        basis(k, i) = (k == 0 ? s0 : sk) * std::cos(kPi * (i + 0.5) * k / n);
    it = cache.emplace(n, std::move(basis)).first;
  }
  return it->second;
}

}  // namespace

Eigen::VectorXd dct_ii_orthonormal(const Eigen::VectorXd& x) {
  const auto& basis = dct_basis(x.size());
  Eigen::VectorXd out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k)
    out[k] = kernels::dot(basis.row(k).data(), x.data(),
                          static_cast<std::size_t>(x.size()));
  return out;
}

Eigen::VectorXd idct_ii_orthonormal(const Eigen::VectorXd& coeffs) {
  // Orthonormal basis: inverse = transpose.
  const auto& basis = dct_basis(coeffs.size());
  return basis.transpose() * coeffs;
}

FeatureTrajectory cepstra(const Spectrogram& spec, const CepstraConfig& cfg) {
  cfg.validate();
  const Eigen::Index bins = spec.num_bins();
  if (cfg.n_cepstra > bins)
    throw Error::validation("ConfigMismatch",
                            "n_cepstra exceeds available spectral bins");
  if (spec.num_frames() < 1)
    throw Error::validation("ConfigMismatch", "empty spectrogram");

  // Moving average of width smoothing_width_hz, truncated at the edges.
  const int half = static_cast<int>(
      std::floor(cfg.smoothing_width_hz / spec.bin_width_hz / 2.0));

  FeatureTrajectory traj;
  traj.times.resize(static_cast<std::size_t>(spec.num_frames()));
  traj.points.resize(spec.num_frames(), cfg.n_cepstra);

  Eigen::VectorXd smoothed(bins);
  for (Eigen::Index t = 0; t < spec.num_frames(); ++t) {
    for (Eigen::Index b = 0; b < bins; ++b) {
      Eigen::Index lo = std::max<Eigen::Index>(0, b - half);
      Eigen::Index hi = std::min<Eigen::Index>(bins - 1, b + half);
      double acc = kernels::sum(spec.frames.row(t).data() + lo,
                                static_cast<std::size_t>(hi - lo + 1));
      smoothed[b] = acc / static_cast<double>(hi - lo + 1);
    }
    for (Eigen::Index b = 0; b < bins; ++b)
      smoothed[b] = std::log(std::max(smoothed[b], cfg.log_floor));
    Eigen::VectorXd coeffs = dct_ii_orthonormal(smoothed);
    traj.points.row(t) = coeffs.head(cfg.n_cepstra).transpose();
    traj.times[static_cast<std::size_t>(t)] = spec.frame_time(t);
  }
  return traj;
}

}  // namespace geoscale
