#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace geoscale {

// Time-ordered sequence of N-dimensional feature points. times are strictly
// increasing seconds; points is T x N.
struct FeatureTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd points;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }

  // Throws Error(validation) on shape mismatch, non-finite values or
  // non-increasing times.
  void validate() const;
};

// Per-sample dx/dt, same length as the source trajectory.
struct VelocitySeries {
  std::vector<double> times;
  Eigen::MatrixXd velocities;
};

// Central differences in the interior, one-sided at the endpoints.
// Throws Error(validation): NonMonotonicTimes; requires T >= 3.
VelocitySeries estimate_velocities(const FeatureTrajectory& traj);

// CSV with header t,x1,...,xN (full precision). Lines starting with '#'
// carry optional metadata and are preserved on read.
void write_trajectory_csv(const std::string& path,
                          const FeatureTrajectory& traj,
                          const std::vector<std::string>& meta = {},
                          const std::string& value_prefix = "x");
struct TrajectoryFile {
  FeatureTrajectory traj;
  std::vector<std::string> meta;  // '#' lines without the marker
};
TrajectoryFile read_trajectory_csv(const std::string& path);

}  // namespace geoscale
