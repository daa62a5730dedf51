#include "geoscale/pca.hpp"

#include <Eigen/Dense>
#include <fstream>

#include <json.hpp>

#include "geoscale/error.hpp"

namespace geoscale {

PcaModel fit_pca(const FeatureTrajectory& traj, int k) {
  traj.validate();
  const Eigen::Index n_samples = traj.size();
  const Eigen::Index dim = traj.dim();
  if (k < 1 || k > dim)
    throw Error::validation("DimensionMismatch",
                            "k must be in [1, feature dimension]");
  if (n_samples <= k)
    throw Error::validation("DimensionMismatch",
                            "need more samples than components");

  PcaModel model;
  model.mean = traj.points.colwise().mean();
  Eigen::MatrixXd centered = traj.points.rowwise() - model.mean.transpose();
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n_samples);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error::numerical("RankDeficient", "eigendecomposition failed");

  // Eigen returns eigenvalues ascending; take the top k in reverse.
  Eigen::VectorXd evals = solver.eigenvalues();
  double max_eval = evals[dim - 1];
  int nonzero = 0;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (evals[i] > max_eval * 1e-12 && evals[i] > 0.0) ++nonzero;
  if (nonzero < k)
    throw Error::numerical("RankDeficient",
                           "fewer than k nonzero covariance eigenvalues");

  model.components.resize(k, dim);
  model.explained_variance.resize(k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd comp = solver.eigenvectors().col(dim - 1 - j);
    // Fix the sign: largest-magnitude entry positive, lowest index on ties.
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < dim; ++i)
      if (std::abs(comp[i]) > std::abs(comp[pivot])) pivot = i;
    if (comp[pivot] < 0.0) comp = -comp;
    model.components.row(j) = comp.transpose();
    model.explained_variance[j] = evals[dim - 1 - j];
  }
  return model;
}

FeatureTrajectory project(const FeatureTrajectory& traj,
                          const PcaModel& model) {
  traj.validate();
  if (traj.dim() != model.in_dim())
    throw Error::validation("DimensionMismatch",
                            "point dimension does not match the PCA model");
  FeatureTrajectory out;
  out.times = traj.times;
  out.points = (traj.points.rowwise() - model.mean.transpose()) *
               model.components.transpose();
  return out;
}

void write_pca_json(const std::string& path, const PcaModel& model) {
  nlohmann::json j;
  j["mean"] = std::vector<double>(model.mean.data(),
                                  model.mean.data() + model.mean.size());
  std::vector<std::vector<double>> comps;
  for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
    comps.emplace_back(model.components.row(r).begin(),
                       model.components.row(r).end());
  }
  j["components"] = comps;
  j["explained_variance"] = std::vector<double>(
      model.explained_variance.data(),
      model.explained_variance.data() + model.explained_variance.size());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  f << j.dump(2) << "\n";
}

PcaModel read_pca_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error::io("EmptyFile", "cannot open PCA JSON", path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error::io("UnsupportedFormat", e.what(), path);
  }
  PcaModel model;
  auto mean = j.at("mean").get<std::vector<double>>();
  auto comps = j.at("components").get<std::vector<std::vector<double>>>();
  auto ev = j.at("explained_variance").get<std::vector<double>>();
  if (comps.empty() || comps.size() != ev.size())
    throw Error::validation("DimensionMismatch",
                            "components/explained_variance mismatch", path);
  model.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                 static_cast<Eigen::Index>(mean.size()));
  model.components.resize(static_cast<Eigen::Index>(comps.size()),
                          static_cast<Eigen::Index>(mean.size()));
  for (std::size_t r = 0; r < comps.size(); ++r) {
    if (comps[r].size() != mean.size())
      throw Error::validation("DimensionMismatch",
                              "component row width mismatch", path);
    for (std::size_t c = 0; c < comps[r].size(); ++c)
      model.components(static_cast<Eigen::Index>(r),
                       static_cast<Eigen::Index>(c)) = comps[r][c];
  }
  model.explained_variance = Eigen::Map<const Eigen::VectorXd>(
      ev.data(), static_cast<Eigen::Index>(ev.size()));
  return model;
}

}  // namespace geoscale
