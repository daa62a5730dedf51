#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "geoscale/error.hpp"
#include "geoscale/trajectory.hpp"
#include "support/oracles.hpp"

using namespace geoscale;

TEST_CASE("linear trajectory has constant velocity (1, 2)") {
  FeatureTrajectory traj;
  for (int i = 0; i < 50; ++i) traj.times.push_back(0.1 * i);
  traj.points.resize(50, 2);
  for (int i = 0; i < 50; ++i) {
    traj.points(i, 0) = traj.times[static_cast<std::size_t>(i)];
    traj.points(i, 1) = 2.0 * traj.times[static_cast<std::size_t>(i)];
  }
  VelocitySeries vel = estimate_velocities(traj);
  for (int i = 0; i < 50; ++i) {
    CHECK(vel.velocities(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vel.velocities(i, 1) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("constant trajectory has zero velocity") {
  FeatureTrajectory traj;
  for (int i = 0; i < 10; ++i) traj.times.push_back(i);
  traj.points = Eigen::MatrixXd::Constant(10, 3, 4.2);
  VelocitySeries vel = estimate_velocities(traj);
  CHECK(vel.velocities.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("central differences track (sin, cos) to 1e-6 at dt = 1e-3") {
  FeatureTrajectory traj;
  const int n = 2000;
  traj.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double t = 1e-3 * i;
    traj.times.push_back(t);
    traj.points(i, 0) = std::sin(t);
    traj.points(i, 1) = std::cos(t);
  }
  VelocitySeries vel = estimate_velocities(traj);
  for (int i = 1; i + 1 < n; ++i) {
    double t = traj.times[static_cast<std::size_t>(i)];
    CHECK(std::abs(vel.velocities(i, 0) - std::cos(t)) < 1e-6);
    CHECK(std::abs(vel.velocities(i, 1) + std::sin(t)) < 1e-6);
  }
}

TEST_CASE("non-monotonic times are rejected") {
  FeatureTrajectory traj;
  traj.times = {0.0, 0.2, 0.2, 0.3};
  traj.points = Eigen::MatrixXd::Zero(4, 2);
  CHECK_THROWS_WITH_AS(estimate_velocities(traj),
                       doctest::Contains("NonMonotonicTimes"), Error);
}

TEST_CASE("trajectory CSV write -> read -> write is byte identical") {
  FeatureTrajectory traj;
  std::mt19937_64 gen(3);
  const int n = 200;
  traj.points.resize(n, 3);
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += 1e-3 + static_cast<double>(gen() >> 40) * 1e-9;
    traj.times.push_back(t);
    for (int j = 0; j < 3; ++j)
      traj.points(i, j) =
          (static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5) * 100.0;
  }
  auto p1 = oracles::temp_path("a.csv");
  auto p2 = oracles::temp_path("b.csv");
  write_trajectory_csv(p1, traj, {"note one", "note two"});
  TrajectoryFile file = read_trajectory_csv(p1);
  CHECK(file.meta.size() == 2);
  write_trajectory_csv(p2, file.traj, file.meta);
  CHECK(oracles::slurp(p1) == oracles::slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
