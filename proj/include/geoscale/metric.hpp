#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "geoscale/trajectory.hpp"

namespace geoscale {

// Rectangular array of evenly spaced nodes. Node order is row-major with
// the last axis fastest.
struct GridSpec {
  Eigen::VectorXd origin;
  Eigen::VectorXd spacing;
  Eigen::VectorXi counts;

  Eigen::Index dim() const { return origin.size(); }
  Eigen::Index num_nodes() const;
  Eigen::Index flat_index(const Eigen::VectorXi& idx) const;
  Eigen::VectorXi multi_index(Eigen::Index flat) const;
  Eigen::VectorXd node_point(const Eigen::VectorXi& idx) const;
  void validate() const;
};

// Christoffel symbols: gamma[k](l, m), symmetric in (l, m).
using Christoffel = std::vector<Eigen::MatrixXd>;

struct MetricEstimationOptions {
  double cond_max = 1e6;
  double ridge_epsilon = 1e-6;  // scale-invariant ridge before inversion
};

// Grid of sampled covariant metric tensors with a C^1 cubic interpolant
// over the largest axis-aligned block of valid nodes. Immutable after
// construction; queries are pure and safe for concurrent reads.
class MetricField {
 public:
  // g_samples: per-node covariant metric (row-major grid order); entries at
  // invalid nodes are ignored. Validates symmetry/positive-definiteness of
  // the valid samples. Throws Error(numerical): NoValidNodes.
  static MetricField from_samples(GridSpec grid,
                                  std::vector<Eigen::MatrixXd> g_samples,
                                  std::vector<std::uint8_t> valid);

  const GridSpec& grid() const { return grid_; }
  Eigen::Index dim() const { return grid_.dim(); }
  bool node_valid(Eigen::Index flat) const { return valid_[static_cast<std::size_t>(flat)] != 0; }
  const Eigen::MatrixXd& node_sample(Eigen::Index flat) const {
    return samples_[static_cast<std::size_t>(flat)];
  }

  // Interpolation domain: the coordinate box spanned by the valid block.
  const Eigen::VectorXd& domain_lo() const { return domain_lo_; }
  const Eigen::VectorXd& domain_hi() const { return domain_hi_; }
  bool contains(const Eigen::VectorXd& point) const;

  // Interpolated covariant metric, symmetrized and eigenvalue-floored
  // (floor hits are counted, not fatal). Throws Error(numerical): OutOfDomain.
  Eigen::MatrixXd metric_at(const Eigen::VectorXd& point) const;
  Eigen::MatrixXd metric_inverse_at(const Eigen::VectorXd& point) const;

  // Levi-Civita connection from the interpolant's analytic derivatives.
  Christoffel christoffel_at(const Eigen::VectorXd& point) const;

  // Allocation-free N = 2 path used by the integrators: writes
  // Gamma^k_{lm} into gamma[k*4 + l*2 + m]. point must already be inside
  // the domain (callers check); out-of-domain queries still throw.
  void christoffel_at_2d(const double* point, double* gamma) const;

  // Scalar curvature via the Riemann contraction with finite-difference
  // derivatives of the Christoffel symbols. N = 2 only.
  // Throws Error(numerical): OutOfDomain; Error(validation): UnsupportedDimension.
  double curvature_scalar_at(const Eigen::VectorXd& point) const;

  std::uint64_t eigenvalue_clamp_count() const { return clamp_count_->load(); }

  // JSON (version "geoscale-metric-v1").
  void save_json(const std::string& path) const;
  static MetricField load_json(const std::string& path);

 private:
  MetricField() = default;
  void build_interpolant();
  // Interpolates every independent component and optionally the gradient.
  void interpolate_components(const Eigen::VectorXd& point, double* value,
                              double* grad) const;
  // Stack-only variant of the above for N = 2 (3 components).
  void patch_2d(const double* point, double* value, double* grad) const;

  GridSpec grid_;
  std::vector<Eigen::MatrixXd> samples_;
  std::vector<std::uint8_t> valid_;

  // Valid block (node index ranges) and its coordinate box.
  Eigen::VectorXi block_lo_, block_hi_;
  Eigen::VectorXd domain_lo_, domain_hi_;
  // Ghost-padded per-component storage (upper triangle, row-major comps).
  std::vector<std::vector<double>> padded_;
  Eigen::VectorXi padded_counts_;
  std::shared_ptr<std::atomic<std::uint64_t>> clamp_count_ =
      std::make_shared<std::atomic<std::uint64_t>>(0);
};

// Averages velocity outer products over an axis-aligned box neighborhood of
// each grid node, inverts to the covariant metric. Nodes with fewer than
// min_samples neighbors or an ill-conditioned average are marked invalid.
// Throws Error(numerical): NoValidNodes; Error(validation) on bad arguments.
MetricField estimate_metric_grid(const FeatureTrajectory& traj,
                                 const VelocitySeries& vel,
                                 const GridSpec& grid,
                                 const Eigen::VectorXd& radius,
                                 int min_samples,
                                 const MetricEstimationOptions& opts = {});

// Spec-level conveniences.
inline Eigen::MatrixXd metric_at(const MetricField& f,
                                 const Eigen::VectorXd& p) {
  return f.metric_at(p);
}
inline Christoffel christoffel(const MetricField& f, const Eigen::VectorXd& p) {
  return f.christoffel_at(p);
}
inline double curvature_scalar(const MetricField& f, const Eigen::VectorXd& p) {
  return f.curvature_scalar_at(p);
}

}  // namespace geoscale
