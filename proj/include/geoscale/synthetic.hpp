#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "geoscale/trajectory.hpp"

namespace geoscale {

// Deterministic synthetic trajectories that densely cover a box: either a
// sum of incommensurate sinusoids per axis or a reflected low-pass noise
// walk.
struct SyntheticSpec {
  enum class Kind { lissajous, noise_walk };
  Kind kind = Kind::noise_walk;
  double duration_s = 100.0;
  double sample_rate_hz = 100.0;
  Eigen::VectorXd box_lo;
  Eigen::VectorXd box_hi;
  std::uint64_t seed = 1;

  // Noise walk shaping: per-sample step std as a fraction of the half
  // width, and the one-pole smoothing coefficient of the increments.
  double step_frac = 0.01;
  double smoothing = 0.9;

  void validate() const;
};

FeatureTrajectory generate_synthetic(const SyntheticSpec& spec);

// Invertible pointwise transforms of a trajectory: linear (A x + b),
// per-axis monotone warp y = c + alpha x + beta tanh(gamma x), or the warp
// composed after the linear map.
struct TransformSpec {
  enum class Kind { linear, monotone_warp, composite };
  Kind kind = Kind::linear;
  Eigen::MatrixXd matrix;  // empty = identity
  Eigen::VectorXd offset;  // empty = zero
  Eigen::VectorXd warp_c, warp_alpha, warp_beta, warp_gamma;
  // Optional validity box; points outside raise OutOfBox.
  Eigen::VectorXd box_lo, box_hi;

  // Invertibility: |det A| bounded away from zero and a guaranteed positive
  // warp derivative (alpha - |beta gamma| > 0 per axis).
  void validate(Eigen::Index dim) const;
  Eigen::VectorXd apply_point(const Eigen::VectorXd& x) const;
  // Analytic linear inverse; warp axes inverted by bisection.
  Eigen::VectorXd invert_point(const Eigen::VectorXd& y) const;
};

// Pointwise application, times unchanged. Throws Error(validation): OutOfBox.
FeatureTrajectory apply_transform(const FeatureTrajectory& traj,
                                  const TransformSpec& spec);

TransformSpec read_transform_json(const std::string& path);
SyntheticSpec read_synthetic_json(const std::string& path);

}  // namespace geoscale
