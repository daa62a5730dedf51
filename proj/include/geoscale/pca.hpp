#pragma once

#include <Eigen/Core>
#include <string>

#include "geoscale/trajectory.hpp"

namespace geoscale {

struct PcaModel {
  Eigen::VectorXd mean;                // N
  Eigen::MatrixXd components;          // K x N, rows orthonormal
  Eigen::VectorXd explained_variance;  // K, non-increasing

  Eigen::Index in_dim() const { return components.cols(); }
  Eigen::Index out_dim() const { return components.rows(); }
};

// Top-k eigenvectors of the (population, 1/T) covariance, eigenvalues
// descending. Sign convention: the entry of largest magnitude in each
// component is positive, ties resolved to the lowest index.
// Throws Error(numerical): RankDeficient; Error(validation) on bad k.
PcaModel fit_pca(const FeatureTrajectory& traj, int k);

// Applies components * (x - mean) per point. Throws Error(validation):
// DimensionMismatch.
FeatureTrajectory project(const FeatureTrajectory& traj,
                          const PcaModel& model);

void write_pca_json(const std::string& path, const PcaModel& model);
PcaModel read_pca_json(const std::string& path);

}  // namespace geoscale
