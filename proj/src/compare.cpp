#include "geoscale/compare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "geoscale/error.hpp"
#include "geoscale/kernels.hpp"

namespace geoscale {

namespace {

constexpr double kTimeMatchTol = 1e-9;

}  // namespace

ComparisonReport compare_representations(const FeatureTrajectory& a,
                                         const FeatureTrajectory& b) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim())
    throw Error::validation("DimensionMismatch",
                            "representations have different dimensions");
  const Eigen::Index dim = a.dim();

  // Timestamp intersection, two pointers.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> matches;
  std::size_t i = 0, j = 0;
  while (i < a.times.size() && j < b.times.size()) {
    double ta = a.times[i], tb = b.times[j];
    if (std::abs(ta - tb) <= kTimeMatchTol) {
      matches.emplace_back(static_cast<Eigen::Index>(i),
                           static_cast<Eigen::Index>(j));
      ++i;
      ++j;
    } else if (ta < tb) {
      ++i;
    } else {
      ++j;
    }
  }
  if (matches.empty())
    throw Error::numerical("NoOverlap", "no common timestamps to compare");

  const auto n = static_cast<Eigen::Index>(matches.size());
  ComparisonReport report;
  report.rms_diff.resize(dim);
  report.correlation.resize(dim);
  report.fraction_compared =
      static_cast<double>(n) /
      static_cast<double>(std::max(a.times.size(), b.times.size()));

  std::vector<double> xa(static_cast<std::size_t>(n));
  std::vector<double> xb(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < dim; ++d) {
    for (Eigen::Index k = 0; k < n; ++k) {
      xa[static_cast<std::size_t>(k)] =
          a.points(matches[static_cast<std::size_t>(k)].first, d);
      xb[static_cast<std::size_t>(k)] =
          b.points(matches[static_cast<std::size_t>(k)].second, d);
    }
    const auto un = static_cast<std::size_t>(n);
    double mean_a = kernels::sum(xa.data(), un) / n;
    double mean_b = kernels::sum(xb.data(), un) / n;
    double saa = 0.0, sbb = 0.0, sab = 0.0, sq = 0.0;
    saa = kernels::dot(xa.data(), xa.data(), un) - n * mean_a * mean_a;
    sbb = kernels::dot(xb.data(), xb.data(), un) - n * mean_b * mean_b;
    sab = kernels::dot(xa.data(), xb.data(), un) - n * mean_a * mean_b;
    for (std::size_t k = 0; k < un; ++k) {
      double diff = xa[k] - xb[k];
      sq += diff * diff;
    }
    report.rms_diff[d] = std::sqrt(sq / n);
    double denom = std::sqrt(std::max(saa, 0.0) * std::max(sbb, 0.0));
    if (denom > 0.0) {
      report.correlation[d] = std::clamp(sab / denom, -1.0, 1.0);
    } else {
      // Degenerate (constant) dimension: perfectly matched or undefined.
      report.correlation[d] = (report.rms_diff[d] == 0.0) ? 1.0 : 0.0;
    }
  }
  return report;
}

void write_report_json(const std::string& path, const ComparisonReport& r) {
  nlohmann::json j;
  j["rms_diff"] = std::vector<double>(r.rms_diff.data(),
                                      r.rms_diff.data() + r.rms_diff.size());
  j["correlation"] =
      std::vector<double>(r.correlation.data(),
                          r.correlation.data() + r.correlation.size());
  j["fraction_compared"] = r.fraction_compared;
  j["excluded_a"] = r.excluded_a;
  j["excluded_b"] = r.excluded_b;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  f << j.dump(2) << "\n";
}

GridSpec fit_grid_to_data(const FeatureTrajectory& traj,
                          const Eigen::VectorXi& counts,
                          double mass_fraction) {
  traj.validate();
  if (counts.size() != traj.dim())
    throw Error::validation("DimensionMismatch",
                            "grid counts dimension mismatch");
  if (!(mass_fraction > 0) || mass_fraction > 1.0)
    throw Error::validation("DimensionMismatch", "mass fraction in (0, 1]");
  GridSpec grid;
  grid.counts = counts;
  grid.origin.resize(traj.dim());
  grid.spacing.resize(traj.dim());
  const double tail = 0.5 * (1.0 - mass_fraction);
  std::vector<double> column(static_cast<std::size_t>(traj.size()));
  for (Eigen::Index a = 0; a < traj.dim(); ++a) {
    for (Eigen::Index i = 0; i < traj.size(); ++i)
      column[static_cast<std::size_t>(i)] = traj.points(i, a);
    std::sort(column.begin(), column.end());
    auto quantile = [&column](double q) {
      double pos = q * (column.size() - 1);
      auto lo = static_cast<std::size_t>(std::floor(pos));
      auto hi = std::min(lo + 1, column.size() - 1);
      double frac = pos - lo;
      return column[lo] * (1.0 - frac) + column[hi] * frac;
    };
    double lo = quantile(tail);
    double hi = quantile(1.0 - tail);
    if (!(hi > lo))
      throw Error::numerical("NoValidNodes",
                             "degenerate data range for grid fitting");
    grid.origin[a] = lo;
    grid.spacing[a] = (hi - lo) / (counts[a] - 1);
  }
  grid.validate();
  return grid;
}

std::vector<double> suggest_reference_times(const FeatureTrajectory& traj,
                                            const VelocitySeries& vel) {
  traj.validate();
  const Eigen::Index dim = traj.dim();
  const Eigen::Index n = traj.size();
  if (vel.velocities.rows() != n || vel.velocities.cols() != dim)
    throw Error::validation("DimensionMismatch",
                            "velocity series does not match the trajectory");

  // Per-axis scale for distance normalization.
  Eigen::VectorXd scale(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    double lo = traj.points.col(a).minCoeff();
    double hi = traj.points.col(a).maxCoeff();
    scale[a] = std::max(hi - lo, 1e-12);
  }

  // Reference point: sample nearest the per-axis median.
  Eigen::VectorXd median(dim);
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index i = 0; i < n; ++i)
      column[static_cast<std::size_t>(i)] = traj.points(i, a);
    std::nth_element(column.begin(), column.begin() + n / 2, column.end());
    median[a] = column[static_cast<std::size_t>(n / 2)];
  }
  Eigen::Index i0 = 0;
  double best = std::numeric_limits<double>::max();
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = ((traj.points.row(i).transpose() - median).array() /
                scale.array())
                   .matrix()
                   .squaredNorm();
    if (d < best) {
      best = d;
      i0 = i;
    }
  }
  Eigen::VectorXd x0 = traj.points.row(i0).transpose();

  double median_speed;
  {
    std::vector<double> speeds(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      speeds[static_cast<std::size_t>(i)] = vel.velocities.row(i).norm();
    std::nth_element(speeds.begin(), speeds.begin() + n / 2, speeds.end());
    median_speed = speeds[static_cast<std::size_t>(n / 2)];
  }

  // Passes near x0 with usable speed, growing the radius until enough
  // candidates exist to pick N well-spread velocity directions.
  std::vector<Eigen::Index> chosen;
  for (double radius = 0.05; radius <= 0.6 && chosen.empty(); radius *= 1.5) {
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = std::sqrt(((traj.points.row(i).transpose() - x0).array() /
                            scale.array())
                               .matrix()
                               .squaredNorm());
      if (d <= radius && vel.velocities.row(i).norm() >= 0.3 * median_speed)
        candidates.push_back(i);
    }
    if (static_cast<Eigen::Index>(candidates.size()) < dim) continue;

    // Greedy volume maximization of the chosen velocity set.
    std::vector<Eigen::Index> picked;
    Eigen::MatrixXd basis(dim, 0);
    for (Eigen::Index round = 0; round < dim; ++round) {
      Eigen::Index best_i = -1;
      double best_score = 1e-12;
      for (Eigen::Index c : candidates) {
        if (std::find(picked.begin(), picked.end(), c) != picked.end())
          continue;
        Eigen::VectorXd v = vel.velocities.row(c).transpose().normalized();
        // Component orthogonal to span(basis), weighted by speed.
        Eigen::VectorXd res = v;
        for (Eigen::Index b = 0; b < basis.cols(); ++b)
          res -= res.dot(basis.col(b)) * basis.col(b);
        double score = res.norm() * vel.velocities.row(c).norm();
        if (score > best_score) {
          best_score = score;
          best_i = c;
        }
      }
      if (best_i < 0) break;
      picked.push_back(best_i);
      Eigen::VectorXd v = vel.velocities.row(best_i).transpose().normalized();
      for (Eigen::Index b = 0; b < basis.cols(); ++b)
        v -= v.dot(basis.col(b)) * basis.col(b);
      if (v.norm() > 1e-12) {
        basis.conservativeResize(dim, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v.normalized();
      }
    }
    if (static_cast<Eigen::Index>(picked.size()) == dim) chosen = picked;
  }
  if (chosen.empty())
    throw Error::numerical("DependentVectors",
                           "no well-spread passes near the reference point");
  std::sort(chosen.begin(), chosen.end());

  std::vector<double> times;
  times.push_back(traj.times[static_cast<std::size_t>(i0)]);
  for (Eigen::Index i : chosen)
    times.push_back(traj.times[static_cast<std::size_t>(i)]);
  return times;
}

ExperimentResult run_invariance_experiment(const FeatureTrajectory& traj,
                                           const TransformSpec& t,
                                           const ExperimentConfig& cfg) {
  const Eigen::Index dim = traj.dim();
  Eigen::VectorXi counts = cfg.grid_counts;
  if (counts.size() == 0) {
    counts.resize(dim);
    counts.setConstant(7);
    if (dim >= 2) counts[1] = 9;
  }
  int min_samples = cfg.min_samples > 0 ? cfg.min_samples
                                        : static_cast<int>(4 * dim);

  FeatureTrajectory transformed = apply_transform(traj, t);
  VelocitySeries vel = estimate_velocities(traj);
  VelocitySeries vel_t = estimate_velocities(transformed);

  auto build_chart = [&](const FeatureTrajectory& tr,
                         const VelocitySeries& ve) {
    GridSpec grid = fit_grid_to_data(tr, counts, cfg.mass_fraction);
    Eigen::VectorXd radius = grid.spacing * cfg.radius_scale;
    MetricField field =
        estimate_metric_grid(tr, ve, grid, radius, min_samples, cfg.metric);
    ReferenceFrame frame =
        select_reference(tr, ve, cfg.t0, cfg.vector_times);
    return ScaleChart(std::move(field), std::move(frame), {}, cfg.tol);
  };

  ScaleChart chart_base = build_chart(traj, vel);
  ScaleChart chart_t = build_chart(transformed, vel_t);

  ExperimentResult result;
  result.self_test_base = chart_base.self_test();
  result.self_test_transformed = chart_t.self_test();

  RescaleResult s_base = chart_base.rescale_trajectory(traj);
  RescaleResult s_t = chart_t.rescale_trajectory(transformed);

  result.x_report = compare_representations(traj, transformed);
  result.s_report =
      compare_representations(s_base.s_traj, s_t.s_traj);
  result.s_report.excluded_a = static_cast<Eigen::Index>(s_base.excluded.size());
  result.s_report.excluded_b = static_cast<Eigen::Index>(s_t.excluded.size());
  return result;
}

}  // namespace geoscale
