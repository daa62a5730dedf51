#include "geoscale/serialize.hpp"

#include <fstream>
#include <vector>

#include "geoscale/error.hpp"

namespace geoscale {

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vec(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

nlohmann::json load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error::io("EmptyFile", "cannot open JSON file", path);
  try {
    nlohmann::json j;
    f >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error::io("UnsupportedFormat", e.what(), path);
  }
}

void dump_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  f << j.dump(2) << "\n";
  if (!f) throw Error::io("EmptyFile", "short write", path);
}

}  // namespace

nlohmann::json metric_to_json(const MetricField& field) {
  const GridSpec& grid = field.grid();
  nlohmann::json j;
  j["version"] = "geoscale-metric-v1";
  j["grid"]["origin"] = to_vec(grid.origin);
  j["grid"]["spacing"] = to_vec(grid.spacing);
  j["grid"]["counts"] =
      std::vector<int>(grid.counts.data(), grid.counts.data() + grid.counts.size());
  const Eigen::Index dim = grid.dim();
  std::vector<std::vector<double>> g;
  std::vector<int> valid;
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
    valid.push_back(field.node_valid(i) ? 1 : 0);
    const Eigen::MatrixXd& m = field.node_sample(i);
    std::vector<double> row(static_cast<std::size_t>(dim * dim), 0.0);
    if (m.rows() == dim && m.cols() == dim)
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
          row[static_cast<std::size_t>(r * dim + c)] = m(r, c);
    g.push_back(std::move(row));
  }
  j["g"] = g;
  j["valid"] = valid;
  return j;
}

MetricField metric_from_json(const nlohmann::json& j) {
  if (j.value("version", "") != "geoscale-metric-v1")
    throw Error::io("UnsupportedFormat", "unknown metric payload version");
  GridSpec grid;
  grid.origin = from_vec(j.at("grid").at("origin"));
  grid.spacing = from_vec(j.at("grid").at("spacing"));
  auto counts = j.at("grid").at("counts").get<std::vector<int>>();
  grid.counts = Eigen::Map<const Eigen::VectorXi>(
      counts.data(), static_cast<Eigen::Index>(counts.size()));
  grid.validate();
  const Eigen::Index dim = grid.dim();
  auto g = j.at("g").get<std::vector<std::vector<double>>>();
  auto valid_in = j.at("valid").get<std::vector<int>>();
  if (static_cast<Eigen::Index>(g.size()) != grid.num_nodes() ||
      valid_in.size() != g.size())
    throw Error::validation("DimensionMismatch",
                            "metric payload node count mismatch");
  std::vector<Eigen::MatrixXd> samples;
  std::vector<std::uint8_t> valid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (static_cast<Eigen::Index>(g[i].size()) != dim * dim)
      throw Error::validation("DimensionMismatch",
                              "metric payload sample size mismatch");
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c)
        m(r, c) = g[i][static_cast<std::size_t>(r * dim + c)];
    samples.push_back(std::move(m));
    valid.push_back(valid_in[i] ? 1 : 0);
  }
  return MetricField::from_samples(std::move(grid), std::move(samples),
                                   std::move(valid));
}

void MetricField::save_json(const std::string& path) const {
  dump_file(path, metric_to_json(*this));
}

MetricField MetricField::load_json(const std::string& path) {
  return metric_from_json(load_file(path));
}

nlohmann::json chart_to_json(const ScaleChart& chart,
                             const SelfTestReport* selftest) {
  nlohmann::json j;
  j["version"] = "geoscale-chart-v1";
  j["metric"] = metric_to_json(chart.field());
  const ReferenceFrame& frame = chart.frame();
  j["frame"]["x0"] = to_vec(frame.x0);
  std::vector<std::vector<double>> h;
  for (Eigen::Index a = 0; a < frame.h.cols(); ++a)
    h.push_back(to_vec(frame.h.col(a)));
  j["frame"]["h"] = h;
  j["frame"]["source_times"] = frame.source_times;
  // 1-based on disk.
  std::vector<int> order;
  for (int a : chart.transport_order()) order.push_back(a + 1);
  j["transport_order"] = order;
  const ChartTolerances& tol = chart.tolerances();
  j["tolerances"]["step_frac"] = tol.step_frac;
  j["tolerances"]["tol_x_scale"] = tol.tol_x_scale;
  j["tolerances"]["max_newton_iter"] = tol.max_newton_iter;
  j["tolerances"]["working_box_shrink"] = tol.working_box_shrink;
  j["working_box"]["lo"] = to_vec(chart.working_box_lo());
  j["working_box"]["hi"] = to_vec(chart.working_box_hi());
  if (selftest != nullptr) {
    j["selftest"]["requested"] = selftest->requested;
    j["selftest"]["tested"] = selftest->tested;
    j["selftest"]["rms"] = selftest->rms;
    j["selftest"]["max_err"] = selftest->max_err;
  }
  return j;
}

ScaleChart chart_from_json(const nlohmann::json& j) {
  if (j.value("version", "") != "geoscale-chart-v1")
    throw Error::io("UnsupportedFormat", "unknown chart payload version");
  MetricField field = metric_from_json(j.at("metric"));
  ReferenceFrame frame;
  frame.x0 = from_vec(j.at("frame").at("x0"));
  auto h = j.at("frame").at("h").get<std::vector<std::vector<double>>>();
  if (h.empty())
    throw Error::validation("DimensionMismatch", "chart frame is empty");
  frame.h.resize(static_cast<Eigen::Index>(h[0].size()),
                 static_cast<Eigen::Index>(h.size()));
  for (std::size_t a = 0; a < h.size(); ++a) {
    if (h[a].size() != h[0].size())
      throw Error::validation("DimensionMismatch", "ragged chart frame");
    for (std::size_t r = 0; r < h[a].size(); ++r)
      frame.h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) =
          h[a][r];
  }
  if (j.at("frame").contains("source_times"))
    frame.source_times =
        j.at("frame").at("source_times").get<std::vector<double>>();

  std::vector<int> order;
  for (int a : j.value("transport_order", std::vector<int>{}))
    order.push_back(a - 1);

  ChartTolerances tol;
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    tol.step_frac = t.value("step_frac", tol.step_frac);
    tol.tol_x_scale = t.value("tol_x_scale", tol.tol_x_scale);
    tol.max_newton_iter = t.value("max_newton_iter", tol.max_newton_iter);
    tol.working_box_shrink =
        t.value("working_box_shrink", tol.working_box_shrink);
  }
  return ScaleChart(std::move(field), std::move(frame), std::move(order), tol);
}

void save_chart_json(const std::string& path, const ScaleChart& chart,
                     const SelfTestReport* selftest) {
  dump_file(path, chart_to_json(chart, selftest));
}

ScaleChart load_chart_json(const std::string& path) {
  return chart_from_json(load_file(path));
}

}  // namespace geoscale
