#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "geoscale/geodesic.hpp"
#include "geoscale/metric.hpp"
#include "geoscale/trajectory.hpp"

namespace geoscale {

// Reference point plus N linearly independent reference vectors (columns).
struct ReferenceFrame {
  Eigen::VectorXd x0;
  Eigen::MatrixXd h;                 // N x N, column a is h_a
  std::vector<double> source_times;  // (t0, t_1, ..., t_N) when from data

  // Throws Error(numerical): DependentVectors when cond(h) >= 1e6.
  void validate() const;
};

// Picks x0 at the sample nearest t0 and h_a as the velocities at the
// samples nearest each entry of vector_times (N entries). source_times
// records the choices so the same times can be reused on a transformed
// signal. Throws: TimeOutOfRange, DependentVectors.
ReferenceFrame select_reference(const FeatureTrajectory& traj,
                                const VelocitySeries& vel, double t0,
                                const std::vector<double>& vector_times);

struct ChartTolerances {
  double step_frac = 0.05;        // RK4 step, fraction of min grid spacing
  double tol_x_scale = 1e-6;      // Newton tolerance, x min grid spacing
  int max_newton_iter = 50;
  double working_box_shrink = 0.6;
  // The chart's usable area ends a little inside the metric domain; the
  // self-test skips draws whose image falls within this fraction of the
  // domain extent from the edge (shooting is ill-posed on the boundary
  // sliver).
  double boundary_margin = 0.02;
};

struct SelfTestReport {
  int requested = 0;
  int tested = 0;
  double rms = 0.0;
  double max_err = 0.0;
};

struct RescaleResult {
  FeatureTrajectory s_traj;  // successfully mapped points, times preserved
  struct Exclusion {
    Eigen::Index index;
    double time;
    std::string reason;
  };
  std::vector<Exclusion> excluded;
};

// Invariant coordinate chart: s is reached from x0 by transporting each
// reference vector along itself for its affine parameter, in transport
// order, co-transporting the rest of the frame.
class ScaleChart {
 public:
  // transport_order is 0-based; empty means identity.
  ScaleChart(MetricField field, ReferenceFrame frame,
             std::vector<int> transport_order = {}, ChartTolerances tol = {});

  const MetricField& field() const { return field_; }
  const ReferenceFrame& frame() const { return frame_; }
  const std::vector<int>& transport_order() const { return order_; }
  const ChartTolerances& tolerances() const { return tol_; }
  Eigen::Index dim() const { return frame_.x0.size(); }

  // Linear-frame preimage of the metric domain, shrunk toward s = 0; the
  // region the self-test samples from.
  const Eigen::VectorXd& working_box_lo() const { return sbox_lo_; }
  const Eigen::VectorXd& working_box_hi() const { return sbox_hi_; }

  // s = 0 returns x0 exactly (zero-length legs short-circuit).
  // Throws Error(numerical): LeftDomain naming the exiting leg.
  Eigen::VectorXd forward_map(const Eigen::VectorXd& s) const;

  // Newton shooting with a finite-difference Jacobian (Broyden-updated
  // between iterations), initialized from the linear frame solve or from
  // s_init when given. Throws: OutOfDomain, NoConvergence.
  Eigen::VectorXd inverse_map(const Eigen::VectorXd& x) const;
  Eigen::VectorXd inverse_map(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& s_init) const;

  // Pointwise inverse_map; failures are collected, never fatal.
  RescaleResult rescale_trajectory(const FeatureTrajectory& traj) const;

  // Round-trip check on random s drawn from the working box.
  SelfTestReport self_test(int n_points = 100, std::uint64_t seed = 1) const;

 private:
  MetricField field_;
  ReferenceFrame frame_;
  std::vector<int> order_;
  ChartTolerances tol_;
  Eigen::VectorXd sbox_lo_, sbox_hi_;
};

// One isocline: the level set of s component `component` (0-based) at
// `level`, as a polyline in x coordinates.
struct Isocline {
  int component = 0;
  double level = 0.0;
  std::vector<Eigen::Vector2d> vertices;
};

// Marching squares on each s component over a resolution x resolution
// lattice spanning region_lo..region_hi (N = 2).
// Throws Error(numerical): OutOfDomain when the region leaves the chart.
std::vector<Isocline> trace_isoclines(const ScaleChart& chart,
                                      const Eigen::Vector2d& region_lo,
                                      const Eigen::Vector2d& region_hi,
                                      const std::vector<double>& levels_1,
                                      const std::vector<double>& levels_2,
                                      int resolution);

void write_isoclines_csv(const std::string& path,
                         const std::vector<Isocline>& isoclines);

// Lattice scan of |R| at metric-grid resolution; ties resolve to the lowest
// lattice index. Throws Error(numerical): OutOfDomain when no node of the
// region supports a curvature evaluation.
Eigen::VectorXd find_curvature_extremum(const MetricField& field,
                                        const Eigen::VectorXd& region_lo,
                                        const Eigen::VectorXd& region_hi);

}  // namespace geoscale
