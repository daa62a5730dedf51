#include "geoscale/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geoscale/error.hpp"

namespace geoscale {

void FeatureTrajectory::validate() const {
  if (points.rows() != static_cast<Eigen::Index>(times.size()))
    throw Error::validation("DimensionMismatch",
                            "times and points length differ");
  if (points.rows() < 1)
    throw Error::validation("DimensionMismatch", "empty trajectory");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw Error::validation("NonMonotonicTimes",
                              "times must be strictly increasing");
  if (!points.allFinite())
    throw Error::validation("DimensionMismatch",
                            "trajectory contains non-finite values");
}

VelocitySeries estimate_velocities(const FeatureTrajectory& traj) {
  traj.validate();
  const Eigen::Index n = traj.size();
  if (n < 3)
    throw Error::validation("NonMonotonicTimes",
                            "need at least 3 samples for velocities");
  VelocitySeries out;
  out.times = traj.times;
  out.velocities.resize(n, traj.dim());
  out.velocities.row(0) = (traj.points.row(1) - traj.points.row(0)) /
                          (traj.times[1] - traj.times[0]);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    out.velocities.row(i) = (traj.points.row(i + 1) - traj.points.row(i - 1)) /
                            (traj.times[i + 1] - traj.times[i - 1]);
  }
  out.velocities.row(n - 1) = (traj.points.row(n - 1) - traj.points.row(n - 2)) /
                              (traj.times[n - 1] - traj.times[n - 2]);
  return out;
}

void write_trajectory_csv(const std::string& path,
                          const FeatureTrajectory& traj,
                          const std::vector<std::string>& meta,
                          const std::string& value_prefix) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  for (const auto& m : meta) f << "# " << m << "\n";
  f << "t";
  for (Eigen::Index j = 0; j < traj.dim(); ++j)
    f << "," << value_prefix << (j + 1);
  f << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[i]);
    f << buf;
    for (Eigen::Index j = 0; j < traj.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.points(i, j));
      f << "," << buf;
    }
    f << "\n";
  }
  if (!f) throw Error::io("EmptyFile", "short write", path);
}

TrajectoryFile read_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error::io("EmptyFile", "cannot open CSV", path);
  TrajectoryFile out;
  std::string line;
  bool header_seen = false;
  Eigen::Index dim = 0;
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = line.find_first_not_of("# ");
      out.meta.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      dim = static_cast<Eigen::Index>(
                std::count(line.begin(), line.end(), ',')) ;
      if (dim < 1 || line.substr(0, 2) != "t,")
        throw Error::validation("DimensionMismatch",
                                "CSV header must be t,x1,...,xN", path);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error::validation("DimensionMismatch",
                                "non-numeric CSV cell: " + cell, path);
      }
    }
    if (static_cast<Eigen::Index>(row.size()) != dim + 1)
      throw Error::validation("DimensionMismatch",
                              "CSV row width differs from header", path);
    times.push_back(row[0]);
    values.insert(values.end(), row.begin() + 1, row.end());
  }
  if (!header_seen || times.empty())
    throw Error::io("EmptyFile", "CSV has no data rows", path);
  out.traj.times = std::move(times);
  out.traj.points.resize(static_cast<Eigen::Index>(out.traj.times.size()), dim);
  for (Eigen::Index i = 0; i < out.traj.points.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      out.traj.points(i, j) = values[static_cast<std::size_t>(i * dim + j)];
  out.traj.validate();
  return out;
}

}  // namespace geoscale
