#pragma once

#include <Eigen/Core>
#include <vector>

#include "geoscale/metric.hpp"

namespace geoscale {

// Position + velocity + optional frame of tangent vectors (columns) carried
// along by parallel transport.
struct GeodesicState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  Eigen::MatrixXd carried_frame;  // N x M, may be empty

  // g-norm of the velocity, conserved along integration.
  double velocity_g_norm(const MetricField& field) const;
};

// Integrates d2x/ds2 = -Gamma(dx, dx) with classical RK4 at fixed affine
// step (last step shortened), co-transporting carried_frame columns.
// Negative s integrates with the reversed velocity for |s|. When
// max_x_step > 0 the affine step is additionally capped so no step moves
// farther than max_x_step in coordinate distance, which keeps the spatial
// resolution uniform when the metric (and so the coordinate speed) varies
// strongly. Throws Error(numerical): LeftDomain with the exit parameter in
// context.
GeodesicState integrate_geodesic(const MetricField& field,
                                 const GeodesicState& start, double s,
                                 double step, double max_x_step = 0.0);

// Parallel transport of v along a polyline path (linearly interpolated).
// Throws Error(numerical): OutOfDomain.
Eigen::VectorXd parallel_transport(const MetricField& field,
                                   const std::vector<Eigen::VectorXd>& path,
                                   const Eigen::VectorXd& v);

}  // namespace geoscale
