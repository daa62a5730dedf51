#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "geoscale/chart.hpp"
#include "geoscale/metric.hpp"
#include "geoscale/synthetic.hpp"
#include "geoscale/trajectory.hpp"

namespace geoscale {

struct ComparisonReport {
  Eigen::VectorXd rms_diff;     // per dimension
  Eigen::VectorXd correlation;  // Pearson, per dimension
  double fraction_compared = 0.0;
  Eigen::Index excluded_a = 0;
  Eigen::Index excluded_b = 0;
};

// Per-dimension RMS difference and Pearson correlation over the samples
// matched by timestamp. Throws Error(numerical): NoOverlap.
ComparisonReport compare_representations(const FeatureTrajectory& a,
                                         const FeatureTrajectory& b);

void write_report_json(const std::string& path, const ComparisonReport& r);

// Grid box covering the central mass_fraction of the data per axis.
GridSpec fit_grid_to_data(const FeatureTrajectory& traj,
                          const Eigen::VectorXi& counts,
                          double mass_fraction = 0.95);

// Heuristic reference selection: t0 at the sample nearest the per-axis
// median point, and N later passes near x0 with well-separated velocity
// directions. Returns {t0, t_1, ..., t_N}.
std::vector<double> suggest_reference_times(const FeatureTrajectory& traj,
                                            const VelocitySeries& vel);

struct ExperimentConfig {
  Eigen::VectorXi grid_counts;  // default 7 x 9
  double mass_fraction = 0.95;
  double radius_scale = 1.0;  // neighborhood radius, x grid spacing
  int min_samples = 0;        // 0 = 4N
  MetricEstimationOptions metric;
  double t0 = 0.0;
  std::vector<double> vector_times;
  ChartTolerances tol;
};

struct ExperimentResult {
  ComparisonReport x_report;  // raw trajectories
  ComparisonReport s_report;  // rescaled trajectories
  SelfTestReport self_test_base;
  SelfTestReport self_test_transformed;
};

// Builds a chart on traj and on apply_transform(traj, t) with identical
// reference times (the matched-reference protocol) and compares both the
// raw and the rescaled representations over common timestamps.
ExperimentResult run_invariance_experiment(const FeatureTrajectory& traj,
                                           const TransformSpec& t,
                                           const ExperimentConfig& cfg);

}  // namespace geoscale
