#include "geoscale/geodesic.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "geoscale/error.hpp"

namespace geoscale {

namespace {

// Flattened integration state: position | velocity | frame columns.
struct PackedState {
  Eigen::VectorXd y;
  Eigen::Index dim;
  Eigen::Index n_frame;

  static PackedState pack(const GeodesicState& s) {
    PackedState p;
    p.dim = s.position.size();
    p.n_frame = s.carried_frame.cols();
    p.y.resize(p.dim * (2 + p.n_frame));
    p.y.head(p.dim) = s.position;
    p.y.segment(p.dim, p.dim) = s.velocity;
    for (Eigen::Index c = 0; c < p.n_frame; ++c)
      p.y.segment(p.dim * (2 + c), p.dim) = s.carried_frame.col(c);
    return p;
  }

  GeodesicState unpack() const {
    GeodesicState s;
    s.position = y.head(dim);
    s.velocity = y.segment(dim, dim);
    s.carried_frame.resize(dim, n_frame);
    for (Eigen::Index c = 0; c < n_frame; ++c)
      s.carried_frame.col(c) = y.segment(dim * (2 + c), dim);
    return s;
  }
};

// dx/ds = v; dv^k/ds = -Gamma^k_{lm} v^l v^m; frame columns transported.
Eigen::VectorXd derivative(const MetricField& field, const PackedState& ref,
                           const Eigen::VectorXd& y) {
  const Eigen::Index dim = ref.dim;
  Eigen::VectorXd x = y.head(dim);
  Eigen::VectorXd v = y.segment(dim, dim);
  Christoffel gamma = field.christoffel_at(x);

  Eigen::VectorXd dy(y.size());
  dy.head(dim) = v;
  for (Eigen::Index k = 0; k < dim; ++k)
    dy[dim + k] = -v.dot(gamma[static_cast<std::size_t>(k)] * v);
  for (Eigen::Index c = 0; c < ref.n_frame; ++c) {
    Eigen::VectorXd w = y.segment(dim * (2 + c), dim);
    for (Eigen::Index k = 0; k < dim; ++k)
      dy[dim * (2 + c) + k] = -v.dot(gamma[static_cast<std::size_t>(k)] * w);
  }
  return dy;
}

[[noreturn]] void throw_left_domain(double s_done, double s_total) {
  char ctx[96];
  std::snprintf(ctx, sizeof(ctx), "s_exit=%.12g of %.12g", s_done, s_total);
  throw Error::numerical("LeftDomain",
                         "geodesic left the metric's valid region", ctx);
}

}  // namespace

double GeodesicState::velocity_g_norm(const MetricField& field) const {
  Eigen::MatrixXd g = field.metric_at(position);
  return std::sqrt(velocity.dot(g * velocity));
}

namespace {

// Fixed-size RK4 for the 2-D case: state is x(2) | v(2) | frame columns.
// Avoids per-stage allocations, which dominate the generic path.
GeodesicState integrate_geodesic_2d(const MetricField& field,
                                    const GeodesicState& init, double sign,
                                    double s_total, double step,
                                    double max_x_step) {
  constexpr int kMaxVars = 16;  // up to 6 carried vectors
  const int n_frame = static_cast<int>(init.carried_frame.cols());
  const int n_vars = 4 + 2 * n_frame;
  if (n_vars > kMaxVars)
    throw Error::validation("DimensionMismatch",
                            "too many carried vectors for the 2-D fast path");

  const double lo0 = field.domain_lo()[0], lo1 = field.domain_lo()[1];
  const double hi0 = field.domain_hi()[0], hi1 = field.domain_hi()[1];
  double y[kMaxVars];
  y[0] = init.position[0];
  y[1] = init.position[1];
  y[2] = init.velocity[0];
  y[3] = init.velocity[1];
  for (int c = 0; c < n_frame; ++c) {
    y[4 + 2 * c] = init.carried_frame(0, c);
    y[5 + 2 * c] = init.carried_frame(1, c);
  }

  double done = 0.0;
  long iterations = 0;
  double gamma[8];
  double k[4][kMaxVars];
  double yt[kMaxVars];

  auto stage = [&](const double* yy, double* out) {
    if (!(yy[0] >= lo0 && yy[0] <= hi0 && yy[1] >= lo1 && yy[1] <= hi1))
      throw_left_domain(done, s_total);
    field.christoffel_at_2d(yy, gamma);
    const double vx = yy[2], vy = yy[3];
    out[0] = vx;
    out[1] = vy;
    for (int kk = 0; kk < 2; ++kk) {
      const double* gk = gamma + 4 * kk;
      out[2 + kk] = -(gk[0] * vx * vx + 2.0 * gk[1] * vx * vy +
                      gk[3] * vy * vy);
      for (int c = 0; c < n_frame; ++c) {
        const double wx = yy[4 + 2 * c], wy = yy[5 + 2 * c];
        out[4 + 2 * c + kk] =
            -(gk[0] * vx * wx + gk[1] * (vx * wy + vy * wx) + gk[3] * vy * wy);
      }
    }
  };

  while (done < s_total) {
    if (++iterations > 2000000)
      throw Error::numerical("NoConvergence",
                             "geodesic step count limit exceeded");
    double h = std::min(step, s_total - done);
    if (max_x_step > 0.0) {
      double speed = std::hypot(y[2], y[3]);
      if (speed * h > max_x_step) h = max_x_step / speed;
    }
    if (h <= s_total * 1e-15) break;
    stage(y, k[0]);
    for (int i = 0; i < n_vars; ++i) yt[i] = y[i] + 0.5 * h * k[0][i];
    stage(yt, k[1]);
    for (int i = 0; i < n_vars; ++i) yt[i] = y[i] + 0.5 * h * k[1][i];
    stage(yt, k[2]);
    for (int i = 0; i < n_vars; ++i) yt[i] = y[i] + h * k[2][i];
    stage(yt, k[3]);
    for (int i = 0; i < n_vars; ++i)
      y[i] += (h / 6.0) * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    done += h;
    if (!(y[0] >= lo0 && y[0] <= hi0 && y[1] >= lo1 && y[1] <= hi1))
      throw_left_domain(done, s_total);
  }

  GeodesicState out;
  out.position.resize(2);
  out.velocity.resize(2);
  out.carried_frame.resize(2, n_frame);
  out.position << y[0], y[1];
  out.velocity << sign * y[2], sign * y[3];
  for (int c = 0; c < n_frame; ++c) {
    out.carried_frame(0, c) = y[4 + 2 * c];
    out.carried_frame(1, c) = y[5 + 2 * c];
  }
  return out;
}

}  // namespace

GeodesicState integrate_geodesic(const MetricField& field,
                                 const GeodesicState& start, double s,
                                 double step, double max_x_step) {
  if (!(step > 0))
    throw Error::validation("DimensionMismatch", "step must be positive");
  if (!field.contains(start.position))
    throw Error::numerical("OutOfDomain", "start outside the valid region");

  GeodesicState init = start;
  double s_total = s;
  if (s < 0) {
    init.velocity = -init.velocity;
    s_total = -s;
  }
  if (s_total == 0.0) return start;

  if (field.dim() == 2)
    return integrate_geodesic_2d(field, init, s < 0 ? -1.0 : 1.0, s_total,
                                 step, max_x_step);

  PackedState state = PackedState::pack(init);
  const Eigen::Index dim = state.dim;
  double done = 0.0;
  long iterations = 0;

  auto stage = [&](const Eigen::VectorXd& y) {
    if (!field.contains(y.head(dim))) throw_left_domain(done, s_total);
    return derivative(field, state, y);
  };

  while (done < s_total) {
    if (++iterations > 2000000)
      throw Error::numerical("NoConvergence",
                             "geodesic step count limit exceeded");
    double h = std::min(step, s_total - done);
    if (max_x_step > 0.0) {
      double speed = state.y.segment(dim, dim).norm();
      if (speed * h > max_x_step) h = max_x_step / speed;
    }
    if (h <= s_total * 1e-15) break;
    Eigen::VectorXd k1 = stage(state.y);
    Eigen::VectorXd k2 = stage(state.y + 0.5 * h * k1);
    Eigen::VectorXd k3 = stage(state.y + 0.5 * h * k2);
    Eigen::VectorXd k4 = stage(state.y + h * k3);
    state.y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    done += h;
    if (!field.contains(state.y.head(dim))) throw_left_domain(done, s_total);
  }

  GeodesicState out = state.unpack();
  if (s < 0) out.velocity = -out.velocity;
  return out;
}

Eigen::VectorXd parallel_transport(const MetricField& field,
                                   const std::vector<Eigen::VectorXd>& path,
                                   const Eigen::VectorXd& v) {
  if (path.size() < 1)
    throw Error::validation("DimensionMismatch", "empty transport path");
  for (const auto& p : path)
    if (!field.contains(p))
      throw Error::numerical("OutOfDomain", "transport path leaves the domain");

  const double min_spacing = field.grid().spacing.minCoeff();
  Eigen::VectorXd w = v;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Eigen::VectorXd& a = path[i];
    Eigen::VectorXd d = path[i + 1] - a;
    double len = d.norm();
    if (len == 0.0) continue;
    int n_sub = std::max(1, static_cast<int>(std::ceil(len / (0.25 * min_spacing))));
    double h = 1.0 / n_sub;

    // dv/du = -Gamma(x(u))(d, v) along the linearly interpolated segment.
    auto deriv = [&](double u, const Eigen::VectorXd& vv) {
      Eigen::VectorXd x = a + u * d;
      if (!field.contains(x))
        throw Error::numerical("OutOfDomain",
                               "transport path leaves the domain");
      Christoffel gamma = field.christoffel_at(x);
      Eigen::VectorXd dv(vv.size());
      for (Eigen::Index k = 0; k < vv.size(); ++k)
        dv[k] = -d.dot(gamma[static_cast<std::size_t>(k)] * vv);
      return dv;
    };

    for (int sub = 0; sub < n_sub; ++sub) {
      double u = sub * h;
      Eigen::VectorXd k1 = deriv(u, w);
      Eigen::VectorXd k2 = deriv(u + 0.5 * h, w + 0.5 * h * k1);
      Eigen::VectorXd k3 = deriv(u + 0.5 * h, w + 0.5 * h * k2);
      Eigen::VectorXd k4 = deriv(u + h, w + h * k3);
      w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return w;
}

}  // namespace geoscale
