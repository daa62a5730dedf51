#include "geoscale/chart.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include "geoscale/error.hpp"

namespace geoscale {

namespace {

constexpr double kFrameCondMax = 1e6;

Eigen::Index nearest_sample(const std::vector<double>& times, double t) {
  if (times.empty() || t < times.front() - 1e-12 || t > times.back() + 1e-12)
    throw Error::validation("TimeOutOfRange",
                            "requested time outside the trajectory span");
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return static_cast<Eigen::Index>(times.size() - 1);
  Eigen::Index hi = static_cast<Eigen::Index>(it - times.begin());
  if (hi == 0) return 0;
  return (t - times[static_cast<std::size_t>(hi - 1)] <=
          times[static_cast<std::size_t>(hi)] - t)
             ? hi - 1
             : hi;
}

double frame_condition(const Eigen::MatrixXd& h) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

void ReferenceFrame::validate() const {
  const Eigen::Index dim = x0.size();
  if (h.rows() != dim || h.cols() != dim || dim < 1)
    throw Error::validation("DimensionMismatch",
                            "reference frame must hold N vectors of size N");
  if (!(frame_condition(h) < kFrameCondMax))
    throw Error::numerical("DependentVectors",
                           "reference vectors are not linearly independent");
}

ReferenceFrame select_reference(const FeatureTrajectory& traj,
                                const VelocitySeries& vel, double t0,
                                const std::vector<double>& vector_times) {
  traj.validate();
  if (vel.velocities.rows() != traj.size() ||
      vel.velocities.cols() != traj.dim())
    throw Error::validation("DimensionMismatch",
                            "velocity series does not match the trajectory");
  if (static_cast<Eigen::Index>(vector_times.size()) != traj.dim())
    throw Error::validation("DimensionMismatch",
                            "need one reference time per dimension");

  ReferenceFrame frame;
  frame.x0 = traj.points.row(nearest_sample(traj.times, t0)).transpose();
  frame.h.resize(traj.dim(), traj.dim());
  frame.source_times.push_back(t0);
  for (Eigen::Index a = 0; a < traj.dim(); ++a) {
    Eigen::Index i = nearest_sample(traj.times, vector_times[static_cast<std::size_t>(a)]);
    frame.h.col(a) = vel.velocities.row(i).transpose();
    frame.source_times.push_back(vector_times[static_cast<std::size_t>(a)]);
  }
  frame.validate();
  return frame;
}

// ---------------------------------------------------------------------------

ScaleChart::ScaleChart(MetricField field, ReferenceFrame frame,
                       std::vector<int> transport_order, ChartTolerances tol)
    : field_(std::move(field)), frame_(std::move(frame)), tol_(tol) {
  frame_.validate();
  const Eigen::Index dim = frame_.x0.size();
  if (field_.dim() != dim)
    throw Error::validation("DimensionMismatch",
                            "frame and metric dimensions differ");
  if (!field_.contains(frame_.x0))
    throw Error::validation("TimeOutOfRange",
                            "reference point outside the metric domain");

  if (transport_order.empty()) {
    for (Eigen::Index a = 0; a < dim; ++a)
      order_.push_back(static_cast<int>(a));
  } else {
    order_ = std::move(transport_order);
    std::vector<bool> seen(static_cast<std::size_t>(dim), false);
    if (static_cast<Eigen::Index>(order_.size()) != dim)
      throw Error::validation("DimensionMismatch", "transport order length");
    for (int a : order_) {
      if (a < 0 || a >= dim || seen[static_cast<std::size_t>(a)])
        throw Error::validation("DimensionMismatch",
                                "transport order is not a permutation");
      seen[static_cast<std::size_t>(a)] = true;
    }
  }
  if (!(tol_.step_frac > 0) || !(tol_.tol_x_scale > 0) ||
      tol_.max_newton_iter < 1)
    throw Error::validation("DimensionMismatch", "bad chart tolerances");

  // Linear-frame preimage of the domain corners, shrunk toward s = 0.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(frame_.h);
  sbox_lo_ = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::max());
  sbox_hi_ = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::lowest());
  for (Eigen::Index corner = 0; corner < (Eigen::Index{1} << dim); ++corner) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index a = 0; a < dim; ++a)
      x[a] = (corner >> a) & 1 ? field_.domain_hi()[a] : field_.domain_lo()[a];
    Eigen::VectorXd s = lu.solve(x - frame_.x0);
    sbox_lo_ = sbox_lo_.cwiseMin(s);
    sbox_hi_ = sbox_hi_.cwiseMax(s);
  }
  sbox_lo_ *= tol_.working_box_shrink;
  sbox_hi_ *= tol_.working_box_shrink;
}

Eigen::VectorXd ScaleChart::forward_map(const Eigen::VectorXd& s) const {
  const Eigen::Index dim = this->dim();
  if (s.size() != dim)
    throw Error::validation("DimensionMismatch", "s has wrong dimension");

  Eigen::VectorXd pos = frame_.x0;
  Eigen::MatrixXd carried = frame_.h;
  const double min_spacing = field_.grid().spacing.minCoeff();

  for (std::size_t leg = 0; leg < order_.size(); ++leg) {
    const int a = order_[leg];
    const double sa = s[a];
    if (sa == 0.0) continue;

    double speed = carried.col(a).norm();
    const double max_x_step = tol_.step_frac * min_spacing;
    double step = max_x_step / std::max(speed, 1e-30);

    GeodesicState st;
    st.position = pos;
    st.velocity = carried.col(a);
    st.carried_frame = carried;
    try {
      st = integrate_geodesic(field_, st, sa, step, max_x_step);
    } catch (const Error& e) {
      if (e.code() == "LeftDomain") {
        char ctx[128];
        std::snprintf(ctx, sizeof(ctx), "leg=%d; %s", a + 1,
                      e.context().c_str());
        throw Error::numerical("LeftDomain", "forward map left the domain",
                               ctx);
      }
      throw;
    }
    pos = st.position;
    carried = st.carried_frame;
  }
  return pos;
}

Eigen::VectorXd ScaleChart::inverse_map(const Eigen::VectorXd& x) const {
  // Linear initialization from the base frame.
  Eigen::VectorXd s0 =
      Eigen::PartialPivLU<Eigen::MatrixXd>(frame_.h).solve(x - frame_.x0);
  return inverse_map(x, s0);
}

Eigen::VectorXd ScaleChart::inverse_map(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& s_init) const {
  const Eigen::Index dim = this->dim();
  if (x.size() != dim || s_init.size() != dim)
    throw Error::validation("DimensionMismatch", "x has wrong dimension");
  if (!field_.contains(x))
    throw Error::numerical("OutOfDomain", "point outside the metric domain");

  const double tol_x = tol_.tol_x_scale * field_.grid().spacing.minCoeff();

  // Pull the start toward s = 0 until the forward map stays in the domain.
  Eigen::VectorXd s = s_init;
  Eigen::VectorXd r;
  bool have_r = false;
  for (int shrink = 0; shrink < 60; ++shrink) {
    try {
      r = forward_map(s) - x;
      have_r = true;
      break;
    } catch (const Error& e) {
      if (e.code() != "LeftDomain") throw;
      s *= 0.5;
    }
  }
  if (!have_r)
    throw Error::numerical("NoConvergence",
                           "could not find an in-domain starting point");

  auto fd_jacobian = [&](const Eigen::VectorXd& at,
                         const Eigen::VectorXd& r_at) {
    Eigen::MatrixXd jac(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
      bool ok = false;
      // Either side of the base point, then a much smaller probe, for
      // points hugging the reachable-set boundary.
      for (double delta : {1e-6 * std::max(1.0, std::abs(at[a])),
                           1e-8 * std::max(1.0, std::abs(at[a]))}) {
        for (double side : {1.0, -1.0}) {
          Eigen::VectorXd sp = at;
          sp[a] += side * delta;
          try {
            jac.col(a) = (forward_map(sp) - x - r_at) / (sp[a] - at[a]);
            ok = true;
            break;
          } catch (const Error& e) {
            if (e.code() != "LeftDomain") throw;
          }
        }
        if (ok) break;
      }
      if (!ok)
        throw Error::numerical("NoConvergence",
                               "Jacobian probe left the domain");
    }
    return jac;
  };

  Eigen::MatrixXd jac = fd_jacobian(s, r);
  bool jac_fresh = true;

  for (int iter = 0; iter < tol_.max_newton_iter; ++iter) {
    double rnorm = r.norm();
    if (rnorm <= tol_x) return s;

    Eigen::VectorXd ds = jac.partialPivLu().solve(-r);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 12; ++half) {
      Eigen::VectorXd s_new = s + lambda * ds;
      try {
        Eigen::VectorXd r_new = forward_map(s_new) - x;
        if (r_new.norm() < rnorm) {
          // Broyden rank-1 update keeps the Jacobian useful without a
          // finite-difference rebuild per iteration.
          Eigen::VectorXd step = s_new - s;
          double denom = step.squaredNorm();
          if (denom > 0)
            jac += ((r_new - r) - jac * step) * step.transpose() / denom;
          s = s_new;
          r = r_new;
          accepted = true;
          jac_fresh = false;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != "LeftDomain") throw;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (!jac_fresh) {
        jac = fd_jacobian(s, r);
        jac_fresh = true;
        continue;
      }
      char ctx[96];
      std::snprintf(ctx, sizeof(ctx), "residual=%.6g tol=%.6g", rnorm, tol_x);
      throw Error::numerical("NoConvergence", "Newton iteration stalled", ctx);
    }
  }
  char ctx[96];
  std::snprintf(ctx, sizeof(ctx), "residual=%.6g tol=%.6g", r.norm(), tol_x);
  throw Error::numerical("NoConvergence",
                         "Newton did not converge within max iterations", ctx);
}

RescaleResult ScaleChart::rescale_trajectory(
    const FeatureTrajectory& traj) const {
  traj.validate();
  if (traj.dim() != dim())
    throw Error::validation("DimensionMismatch",
                            "trajectory dimension does not match the chart");
  RescaleResult result;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> rows;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(frame_.h);
  bool have_prev = false;
  Eigen::VectorXd prev_s;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    Eigen::VectorXd x = traj.points.row(i).transpose();
    // Adjacent samples are close; the previous solution is a better start
    // than the linear frame solve.
    Eigen::VectorXd init =
        have_prev ? prev_s : Eigen::VectorXd(lu.solve(x - frame_.x0));
    try {
      Eigen::VectorXd s = inverse_map(x, init);
      prev_s = s;
      have_prev = true;
      rows.push_back(std::move(s));
      times.push_back(traj.times[static_cast<std::size_t>(i)]);
    } catch (const Error& e) {
      have_prev = false;
      result.excluded.push_back(
          {i, traj.times[static_cast<std::size_t>(i)], e.code()});
    }
  }
  result.s_traj.times = std::move(times);
  result.s_traj.points.resize(static_cast<Eigen::Index>(rows.size()), dim());
  for (std::size_t i = 0; i < rows.size(); ++i)
    result.s_traj.points.row(static_cast<Eigen::Index>(i)) =
        rows[i].transpose();
  return result;
}

SelfTestReport ScaleChart::self_test(int n_points, std::uint64_t seed) const {
  SelfTestReport report;
  report.requested = n_points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double sq_sum = 0.0;
  int attempts = 0;
  const int max_attempts = 10 * n_points;
  while (report.tested < n_points && attempts < max_attempts) {
    ++attempts;
    Eigen::VectorXd s(dim());
    for (Eigen::Index a = 0; a < dim(); ++a)
      s[a] = sbox_lo_[a] + (sbox_hi_[a] - sbox_lo_[a]) * unit(rng);
    Eigen::VectorXd x;
    try {
      x = forward_map(s);
    } catch (const Error& e) {
      if (e.code() == "LeftDomain") continue;
      throw;
    }
    if (!field_.contains(x)) continue;
    // Stay off the boundary sliver where shooting is ill-posed.
    bool near_edge = false;
    for (Eigen::Index a = 0; a < dim(); ++a) {
      double margin = tol_.boundary_margin *
                      (field_.domain_hi()[a] - field_.domain_lo()[a]);
      if (x[a] < field_.domain_lo()[a] + margin ||
          x[a] > field_.domain_hi()[a] - margin)
        near_edge = true;
    }
    if (near_edge) continue;
    Eigen::VectorXd s_back;
    try {
      s_back = inverse_map(x);
    } catch (const Error&) {
      // Count a failed inversion as a maximal-error sample.
      report.max_err = std::numeric_limits<double>::infinity();
      ++report.tested;
      continue;
    }
    double err = (s_back - s).norm();
    sq_sum += err * err;
    report.max_err = std::max(report.max_err, err);
    ++report.tested;
  }
  if (report.tested > 0) report.rms = std::sqrt(sq_sum / report.tested);
  return report;
}

// ---------------------------------------------------------------------------
// Isoclines (marching squares over the inverse map, N = 2)

namespace {

struct Segment {
  Eigen::Vector2d a, b;
};

Eigen::Vector2d edge_crossing(const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                              double vp, double vq, double level) {
  double t = (level - vp) / (vq - vp);
  t = std::clamp(t, 0.0, 1.0);
  return p + t * (q - p);
}

// Chains loose segments into polylines by matching endpoints on a
// quantized key.
std::vector<std::vector<Eigen::Vector2d>> stitch(
    const std::vector<Segment>& segments, double tol) {
  auto key = [tol](const Eigen::Vector2d& p) {
    long kx = static_cast<long>(std::llround(p.x() / tol));
    long ky = static_cast<long>(std::llround(p.y() / tol));
    return std::pair<long, long>(kx, ky);
  };
  std::map<std::pair<long, long>, std::vector<std::size_t>> by_end;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    by_end[key(segments[i].a)].push_back(i);
    by_end[key(segments[i].b)].push_back(i);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<std::vector<Eigen::Vector2d>> polylines;

  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    used[start] = true;
    std::deque<Eigen::Vector2d> chain{segments[start].a, segments[start].b};
    // Extend both ends greedily.
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        Eigen::Vector2d tip = dir == 0 ? chain.back() : chain.front();
        auto it = by_end.find(key(tip));
        if (it == by_end.end()) break;
        std::size_t next = segments.size();
        for (std::size_t cand : it->second)
          if (!used[cand]) {
            next = cand;
            break;
          }
        if (next == segments.size()) break;
        used[next] = true;
        const Segment& seg = segments[next];
        Eigen::Vector2d far =
            (key(seg.a) == key(tip)) ? seg.b : seg.a;
        if (dir == 0)
          chain.push_back(far);
        else
          chain.push_front(far);
      }
    }
    polylines.emplace_back(chain.begin(), chain.end());
  }
  return polylines;
}

}  // namespace

std::vector<Isocline> trace_isoclines(const ScaleChart& chart,
                                      const Eigen::Vector2d& region_lo,
                                      const Eigen::Vector2d& region_hi,
                                      const std::vector<double>& levels_1,
                                      const std::vector<double>& levels_2,
                                      int resolution) {
  if (chart.dim() != 2)
    throw Error::validation("UnsupportedDimension",
                            "isoclines implemented for N = 2 only");
  if (resolution < 2)
    throw Error::validation("DimensionMismatch", "resolution must be >= 2");
  for (int a = 0; a < 2; ++a)
    if (!(region_lo[a] < region_hi[a]))
      throw Error::validation("DimensionMismatch", "empty isocline region");
  Eigen::VectorXd lo2(2), hi2(2);
  lo2 << region_lo[0], region_lo[1];
  hi2 << region_hi[0], region_hi[1];
  if (!chart.field().contains(lo2) || !chart.field().contains(hi2))
    throw Error::numerical("OutOfDomain",
                           "isocline region leaves the chart domain");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> s1(static_cast<std::size_t>(resolution) * resolution, nan);
  std::vector<double> s2 = s1;
  auto at = [resolution](std::vector<double>& v, int i, int j) -> double& {
    return v[static_cast<std::size_t>(i) * resolution + j];
  };

  Eigen::Vector2d span = region_hi - region_lo;
  bool have_prev = false;
  Eigen::VectorXd prev_s;
  for (int i = 0; i < resolution; ++i) {
    have_prev = false;  // restart the warm start on each lattice column
    for (int j = 0; j < resolution; ++j) {
      Eigen::VectorXd x(2);
      x[0] = region_lo[0] + span[0] * i / (resolution - 1);
      x[1] = region_lo[1] + span[1] * j / (resolution - 1);
      try {
        Eigen::VectorXd s = have_prev ? chart.inverse_map(x, prev_s)
                                      : chart.inverse_map(x);
        at(s1, i, j) = s[0];
        at(s2, i, j) = s[1];
        prev_s = s;
        have_prev = true;
      } catch (const Error&) {
        have_prev = false;  // lattice point not invertible; skip its cells
      }
    }
  }

  auto extract = [&](const std::vector<double>& f, int component,
                     double level, std::vector<Isocline>& out) {
    std::vector<Segment> segments;
    for (int i = 0; i + 1 < resolution; ++i)
      for (int j = 0; j + 1 < resolution; ++j) {
        double v00 = f[static_cast<std::size_t>(i) * resolution + j];
        double v10 = f[static_cast<std::size_t>(i + 1) * resolution + j];
        double v11 = f[static_cast<std::size_t>(i + 1) * resolution + j + 1];
        double v01 = f[static_cast<std::size_t>(i) * resolution + j + 1];
        if (std::isnan(v00) || std::isnan(v10) || std::isnan(v11) ||
            std::isnan(v01))
          continue;
        Eigen::Vector2d p00(region_lo[0] + span[0] * i / (resolution - 1),
                            region_lo[1] + span[1] * j / (resolution - 1));
        Eigen::Vector2d p10(region_lo[0] + span[0] * (i + 1) / (resolution - 1),
                            region_lo[1] + span[1] * j / (resolution - 1));
        Eigen::Vector2d p11(region_lo[0] + span[0] * (i + 1) / (resolution - 1),
                            region_lo[1] + span[1] * (j + 1) / (resolution - 1));
        Eigen::Vector2d p01(region_lo[0] + span[0] * i / (resolution - 1),
                            region_lo[1] + span[1] * (j + 1) / (resolution - 1));

        int idx = (v00 >= level ? 1 : 0) | (v10 >= level ? 2 : 0) |
                  (v11 >= level ? 4 : 0) | (v01 >= level ? 8 : 0);
        if (idx == 0 || idx == 15) continue;

        // Edges: bottom (p00-p10), right (p10-p11), top (p01-p11),
        // left (p00-p01).
        Eigen::Vector2d eb = edge_crossing(p00, p10, v00, v10, level);
        Eigen::Vector2d er = edge_crossing(p10, p11, v10, v11, level);
        Eigen::Vector2d et = edge_crossing(p01, p11, v01, v11, level);
        Eigen::Vector2d el = edge_crossing(p00, p01, v00, v01, level);

        auto add = [&segments](const Eigen::Vector2d& a,
                               const Eigen::Vector2d& b) {
          segments.push_back({a, b});
        };
        switch (idx) {
          case 1: case 14: add(el, eb); break;
          case 2: case 13: add(eb, er); break;
          case 3: case 12: add(el, er); break;
          case 4: case 11: add(er, et); break;
          case 6: case 9:  add(eb, et); break;
          case 7: case 8:  add(el, et); break;
          case 5: case 10: {
            // Saddle; split by the cell-center value.
            double center = 0.25 * (v00 + v10 + v11 + v01);
            bool center_high = center >= level;
            if ((idx == 5) == center_high) {
              add(el, et);
              add(eb, er);
            } else {
              add(el, eb);
              add(er, et);
            }
            break;
          }
          default: break;
        }
      }

    double tol = 1e-9 * std::max(span[0], span[1]);
    for (auto& poly : stitch(segments, tol)) {
      Isocline iso;
      iso.component = component;
      iso.level = level;
      iso.vertices = std::move(poly);
      out.push_back(std::move(iso));
    }
  };

  std::vector<Isocline> out;
  for (double level : levels_1) extract(s1, 1, level, out);
  for (double level : levels_2) extract(s2, 2, level, out);
  return out;
}

void write_isoclines_csv(const std::string& path,
                         const std::vector<Isocline>& isoclines) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  f << "component,level,vertex_index,x1,x2\n";
  char buf[32];
  for (const auto& iso : isoclines) {
    int vi = 0;
    for (const auto& v : iso.vertices) {
      f << iso.component << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", iso.level);
      f << buf << "," << vi++ << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", v.x());
      f << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", v.y());
      f << buf << "\n";
    }
  }
  if (!f) throw Error::io("EmptyFile", "short write", path);
}

Eigen::VectorXd find_curvature_extremum(const MetricField& field,
                                        const Eigen::VectorXd& region_lo,
                                        const Eigen::VectorXd& region_hi) {
  if (field.dim() != 2)
    throw Error::validation("UnsupportedDimension",
                            "curvature extremum implemented for N = 2 only");
  const GridSpec& grid = field.grid();
  Eigen::VectorXd best_point;
  double best_abs = -1.0;
  for (Eigen::Index flat = 0; flat < grid.num_nodes(); ++flat) {
    Eigen::VectorXd p = grid.node_point(grid.multi_index(flat));
    bool in_region = true;
    for (Eigen::Index a = 0; a < 2; ++a)
      if (p[a] < region_lo[a] || p[a] > region_hi[a]) in_region = false;
    if (!in_region) continue;
    double r;
    try {
      r = field.curvature_scalar_at(p);
    } catch (const Error&) {
      continue;  // stencil outside the valid region
    }
    if (std::abs(r) > best_abs) {
      best_abs = std::abs(r);
      best_point = p;
    }
  }
  if (best_abs < 0)
    throw Error::numerical("OutOfDomain",
                           "no lattice point supports a curvature evaluation");
  return best_point;
}

}  // namespace geoscale
