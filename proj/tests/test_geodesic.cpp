#include <doctest.h>

#include <cmath>

#include "geoscale/error.hpp"
#include "geoscale/geodesic.hpp"
#include "support/oracles.hpp"

using namespace geoscale;

namespace {

GeodesicState state2(double x0, double x1, double v0, double v1) {
  GeodesicState s;
  s.position.resize(2);
  s.velocity.resize(2);
  s.position << x0, x1;
  s.velocity << v0, v1;
  return s;
}

// Polar-plane oracle: map (r, theta) to Cartesian, advance along the
// straight line, map back.
Eigen::Vector2d polar_line_endpoint(double r, double th, double vr,
                                    double vth, double s) {
  double cx = r * std::cos(th), cy = r * std::sin(th);
  // Velocity pushed through the Jacobian of the polar->Cartesian map.
  double vx = vr * std::cos(th) - r * std::sin(th) * vth;
  double vy = vr * std::sin(th) + r * std::cos(th) * vth;
  double ex = cx + s * vx, ey = cy + s * vy;
  return {std::hypot(ex, ey), std::atan2(ey, ex)};
}

}  // namespace

TEST_CASE("flat-field geodesics are straight lines") {
  MetricField flat = oracles::flat_field();
  GeodesicState end =
      integrate_geodesic(flat, state2(0, 0, 1, 0), 5.0, 0.1);
  CHECK(end.position[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(end.position[1] == doctest::Approx(0.0));
  CHECK(end.velocity[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(end.velocity[1] == doctest::Approx(0.0));
}

TEST_CASE("polar-plane geodesic reaches the Cartesian-oracle endpoint") {
  MetricField field = oracles::polar_field();
  GeodesicState end =
      integrate_geodesic(field, state2(1.0, 0.0, 0.0, 1.0), 1.0,
                         0.05 * field.grid().spacing.minCoeff());
  Eigen::Vector2d expect = polar_line_endpoint(1.0, 0.0, 0.0, 1.0, 1.0);
  CHECK(expect[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(expect[1] == doctest::Approx(oracles::kPi / 4.0).epsilon(1e-12));
  CHECK(std::abs(end.position[0] - expect[0]) < 1e-4);
  CHECK(std::abs(end.position[1] - expect[1]) < 1e-4);
}

TEST_CASE("g-norm of the velocity is conserved to 1e-6 per unit parameter") {
  for (double rho : {1.0, 2.0}) {
    MetricField sphere = oracles::sphere_field(rho);
    GeodesicState start = state2(1.2, -0.3, 0.4, 0.5);
    double n0 = start.velocity_g_norm(sphere);
    const double s = 1.5;
    GeodesicState end = integrate_geodesic(
        sphere, start, s, 0.05 * sphere.grid().spacing.minCoeff());
    double n1 = end.velocity_g_norm(sphere);
    CHECK(std::abs(n1 - n0) / n0 < 1e-6 * s);
  }
}

TEST_CASE("halving the step shrinks the endpoint error about 16x") {
  MetricField field = oracles::polar_field();
  Eigen::Vector2d expect = polar_line_endpoint(1.0, 0.0, 0.3, 1.1, 1.0);
  auto err_at = [&](double step) {
    GeodesicState end =
        integrate_geodesic(field, state2(1.0, 0.0, 0.3, 1.1), 1.0, step);
    return std::hypot(end.position[0] - expect[0],
                      end.position[1] - expect[1]);
  };
  // Steps large enough that truncation dominates the interpolation floor.
  double e1 = err_at(0.2);
  double e2 = err_at(0.1);
  double ratio = e1 / e2;
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("leaving the domain raises LeftDomain with the exit parameter") {
  MetricField flat = oracles::flat_field(-1.0, 1.0, 9);
  try {
    integrate_geodesic(flat, state2(0.5, 0.0, 1.0, 0.0), 10.0, 0.05);
    FAIL("expected LeftDomain");
  } catch (const Error& e) {
    CHECK(e.code() == "LeftDomain");
    CHECK(e.context().find("s_exit=") != std::string::npos);
  }
}

TEST_CASE("zero-length integration returns the start exactly") {
  MetricField field = oracles::polar_field();
  GeodesicState start = state2(1.3, 0.2, 0.4, -0.1);
  GeodesicState end = integrate_geodesic(field, start, 0.0, 1.0);
  CHECK(end.position == start.position);
  CHECK(end.velocity == start.velocity);
}

TEST_CASE("parallel transport on a flat field is the identity") {
  MetricField flat = oracles::flat_field();
  std::vector<Eigen::VectorXd> path;
  for (int i = 0; i <= 20; ++i) {
    Eigen::VectorXd p(2);
    p << -2.0 + 0.2 * i, std::sin(0.3 * i);
    path.push_back(p);
  }
  Eigen::VectorXd v(2);
  v << 0.7, -0.4;
  Eigen::VectorXd w = parallel_transport(flat, path, v);
  CHECK((w - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("holonomy around a small square matches curvature x area") {
  const double rho = 1.5;
  MetricField sphere = oracles::sphere_field(rho);
  const double th0 = 1.3, ph0 = -0.2, d = 0.25;

  // Square loop in (theta, phi) with dense polyline edges.
  std::vector<Eigen::VectorXd> path;
  auto push = [&path](double th, double ph) {
    Eigen::VectorXd p(2);
    p << th, ph;
    path.push_back(p);
  };
  const int m = 40;
  for (int i = 0; i <= m; ++i) push(th0 + d * i / m, ph0);
  for (int i = 1; i <= m; ++i) push(th0 + d, ph0 + d * i / m);
  for (int i = 1; i <= m; ++i) push(th0 + d - d * i / m, ph0 + d);
  for (int i = 1; i <= m; ++i) push(th0, ph0 + d - d * i / m);

  Eigen::VectorXd v(2);
  v << 0.3, 0.2;
  Eigen::VectorXd w = parallel_transport(sphere, path, v);

  // Rotation angle of the transported vector, measured with the metric at
  // the base point.
  Eigen::MatrixXd g = sphere.metric_at(path.front());
  double cosang = v.dot(g * w) /
                  std::sqrt(v.dot(g * v) * w.dot(g * w));
  double angle = std::acos(std::clamp(cosang, -1.0, 1.0));

  // Enclosed area on the sphere: rho^2 dphi (cos th0 - cos(th0+d)).
  double area = rho * rho * d * (std::cos(th0) - std::cos(th0 + d));
  double expected = area / (rho * rho);  // K x area
  CHECK(angle == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("g-inner products of co-transported vectors are conserved") {
  MetricField sphere = oracles::sphere_field(2.0);
  std::vector<Eigen::VectorXd> path;
  for (int i = 0; i <= 60; ++i) {
    Eigen::VectorXd p(2);
    p << 1.0 + 0.012 * i, -0.5 + 0.013 * i;
    path.push_back(p);
  }
  Eigen::VectorXd a(2), b(2);
  a << 0.5, 0.1;
  b << -0.2, 0.4;
  Eigen::VectorXd ta = parallel_transport(sphere, path, a);
  Eigen::VectorXd tb = parallel_transport(sphere, path, b);
  double before = a.dot(sphere.metric_at(path.front()) * b);
  double after = ta.dot(sphere.metric_at(path.back()) * tb);
  CHECK(after == doctest::Approx(before).epsilon(1e-6));
}

TEST_CASE("carried frame vectors transport like the velocity") {
  MetricField field = oracles::polar_field();
  GeodesicState start = state2(1.5, 0.1, 0.5, 0.3);
  start.carried_frame.resize(2, 2);
  start.carried_frame.col(0) = start.velocity;
  start.carried_frame.col(1) << -0.3, 0.8;
  GeodesicState end = integrate_geodesic(
      field, start, 1.0, 0.05 * field.grid().spacing.minCoeff());
  // Column 0 was the velocity itself; transporting it along the geodesic
  // must agree with the integrated velocity.
  CHECK((end.carried_frame.col(0) - end.velocity).cwiseAbs().maxCoeff() <
        1e-9);
  // Metric compatibility for the second vector.
  double before =
      start.carried_frame.col(1).dot(field.metric_at(start.position) *
                                     start.carried_frame.col(1));
  double after = end.carried_frame.col(1).dot(field.metric_at(end.position) *
                                              end.carried_frame.col(1));
  CHECK(after == doctest::Approx(before).epsilon(1e-6));
}
