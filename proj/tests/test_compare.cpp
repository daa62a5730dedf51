#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "geoscale/compare.hpp"
#include "geoscale/error.hpp"
#include "geoscale/synthetic.hpp"
#include "support/oracles.hpp"

using namespace geoscale;

namespace {

FeatureTrajectory wave_traj(int n, double dt, double offset0 = 0.0) {
  FeatureTrajectory traj;
  traj.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double t = offset0 + i * dt;
    traj.times.push_back(t);
    traj.points(i, 0) = std::sin(0.37 * t) + 0.2 * std::sin(1.1 * t);
    traj.points(i, 1) = std::cos(0.23 * t);
  }
  return traj;
}

}  // namespace

TEST_CASE("identical trajectories: rms 0, correlation 1") {
  FeatureTrajectory a = wave_traj(500, 0.01);
  ComparisonReport r = compare_representations(a, a);
  CHECK(r.rms_diff.maxCoeff() == 0.0);
  CHECK(r.correlation.minCoeff() == 1.0);
  CHECK(r.fraction_compared == 1.0);
}

TEST_CASE("constant offset: rms = |offset|, correlation 1") {
  FeatureTrajectory a = wave_traj(500, 0.01);
  FeatureTrajectory b = a;
  b.points.col(0).array() += 0.75;
  ComparisonReport r = compare_representations(a, b);
  CHECK(r.rms_diff[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.rms_diff[1] == 0.0);
  CHECK(r.correlation[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sign flip: correlation -1 in that dimension") {
  FeatureTrajectory a = wave_traj(500, 0.01);
  FeatureTrajectory b = a;
  b.points.col(1) = -b.points.col(1);
  ComparisonReport r = compare_representations(a, b);
  CHECK(r.correlation[1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.correlation[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial overlap is matched by timestamp") {
  FeatureTrajectory a = wave_traj(100, 0.01, 0.0);
  FeatureTrajectory b = wave_traj(100, 0.01, 0.25);  // overlaps on 75
  ComparisonReport r = compare_representations(a, b);
  CHECK(r.fraction_compared == doctest::Approx(0.75));

  FeatureTrajectory c = wave_traj(100, 0.01, 50.0);
  CHECK_THROWS_WITH_AS(compare_representations(a, c),
                       doctest::Contains("NoOverlap"), Error);
}

TEST_CASE("fit_grid_to_data covers the central mass") {
  FeatureTrajectory traj = wave_traj(5000, 0.01);
  Eigen::VectorXi counts(2);
  counts << 7, 9;
  GridSpec grid = fit_grid_to_data(traj, counts, 0.95);
  CHECK(grid.counts[0] == 7);
  CHECK(grid.counts[1] == 9);
  double hi0 = grid.origin[0] + grid.spacing[0] * 6;
  CHECK(grid.origin[0] > traj.points.col(0).minCoeff() - 1e-12);
  CHECK(hi0 < traj.points.col(0).maxCoeff() + 1e-12);
}

TEST_CASE("suggest_reference_times returns usable in-span times") {
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::noise_walk;
  spec.duration_s = 400;
  spec.sample_rate_hz = 100;
  spec.seed = 21;
  spec.box_lo = Eigen::VectorXd::Constant(2, -1.0);
  spec.box_hi = Eigen::VectorXd::Constant(2, 1.0);
  FeatureTrajectory traj = generate_synthetic(spec);
  VelocitySeries vel = estimate_velocities(traj);
  std::vector<double> times = suggest_reference_times(traj, vel);
  REQUIRE(times.size() == 3);
  for (double t : times) {
    CHECK(t >= traj.times.front());
    CHECK(t <= traj.times.back());
  }
  ReferenceFrame frame =
      select_reference(traj, vel, times[0], {times[1], times[2]});
  CHECK(frame.source_times.size() == 3);
}

TEST_CASE("identity transform: s discrepancy at solver-noise level") {
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::noise_walk;
  spec.duration_s = 300;
  spec.sample_rate_hz = 100;
  spec.seed = 31;
  spec.box_lo = Eigen::VectorXd::Constant(2, -1.0);
  spec.box_hi = Eigen::VectorXd::Constant(2, 1.0);
  FeatureTrajectory traj = generate_synthetic(spec);
  VelocitySeries vel = estimate_velocities(traj);

  ExperimentConfig cfg;
  std::vector<double> times = suggest_reference_times(traj, vel);
  cfg.t0 = times[0];
  cfg.vector_times = {times[1], times[2]};

  TransformSpec identity;
  ExperimentResult result = run_invariance_experiment(traj, identity, cfg);
  CHECK(result.s_report.rms_diff.maxCoeff() < 1e-5);
  CHECK(result.x_report.rms_diff.maxCoeff() == 0.0);
}

TEST_CASE("time-shifted copies produce identical reports") {
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::noise_walk;
  spec.duration_s = 200;
  spec.sample_rate_hz = 100;
  spec.seed = 57;
  spec.box_lo = Eigen::VectorXd::Constant(2, -1.0);
  spec.box_hi = Eigen::VectorXd::Constant(2, 1.0);
  FeatureTrajectory traj = generate_synthetic(spec);

  const double shift = 5.0;
  FeatureTrajectory shifted = traj;
  for (double& t : shifted.times) t += shift;

  TransformSpec lin;
  lin.matrix.resize(2, 2);
  lin.matrix << 1.2, 0.1, -0.1, 0.9;

  VelocitySeries vel = estimate_velocities(traj);
  std::vector<double> times = suggest_reference_times(traj, vel);

  ExperimentConfig cfg;
  cfg.t0 = times[0];
  cfg.vector_times = {times[1], times[2]};
  ExperimentResult base = run_invariance_experiment(traj, lin, cfg);

  ExperimentConfig cfg_shift = cfg;
  cfg_shift.t0 = times[0] + shift;
  cfg_shift.vector_times = {times[1] + shift, times[2] + shift};
  ExperimentResult moved = run_invariance_experiment(shifted, lin, cfg_shift);

  CHECK((base.s_report.rms_diff - moved.s_report.rms_diff)
            .cwiseAbs()
            .maxCoeff() < 1e-9);
  CHECK((base.s_report.correlation - moved.s_report.correlation)
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("comparison report JSON serializes every field") {
  FeatureTrajectory a = wave_traj(50, 0.01);
  ComparisonReport r = compare_representations(a, a);
  r.excluded_a = 3;
  auto path = oracles::temp_path("report.json");
  write_report_json(path, r);
  std::string text = oracles::slurp(path);
  CHECK(text.find("rms_diff") != std::string::npos);
  CHECK(text.find("correlation") != std::string::npos);
  CHECK(text.find("fraction_compared") != std::string::npos);
  CHECK(text.find("excluded_a") != std::string::npos);
  std::remove(path.c_str());
}
