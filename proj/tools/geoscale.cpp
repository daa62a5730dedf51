// Command-line driver: features, chart, rescale, isoclines, compare, synth,
// transform. Exit codes: 0 ok, 2 io, 3 validation, 4 numerical failure.
// Errors are reported as one JSON object on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geoscale/chart.hpp"
#include "geoscale/compare.hpp"
#include "geoscale/error.hpp"
#include "geoscale/metric.hpp"
#include "geoscale/pca.hpp"
#include "geoscale/serialize.hpp"
#include "geoscale/spectrum.hpp"
#include "geoscale/svg.hpp"
#include "geoscale/synthetic.hpp"
#include "geoscale/trajectory.hpp"
#include "geoscale/wav.hpp"

namespace gs = geoscale;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config

struct PipelineConfig {
  gs::CepstraConfig cepstra;
  int pca_k = 2;

  std::string grid_mode = "auto";
  Eigen::VectorXi grid_counts;
  double mass_fraction = 0.95;
  Eigen::VectorXd grid_origin, grid_spacing;

  double radius_scale = 1.0;
  int min_samples = 0;  // 0 = 4N
  gs::MetricEstimationOptions metric;

  gs::ChannelFilterSpec filter;

  bool reference_auto = false;
  std::optional<double> t0;
  std::vector<double> vector_times;

  gs::ChartTolerances solver;
  std::uint64_t seed = 1;
  std::optional<double> history_window_s;
};

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object())
    throw gs::Error::validation("ConfigMismatch", where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end())
      throw gs::Error::validation("ConfigMismatch",
                                  "unknown config key '" + key + "' in " + where);
  }
}

Eigen::VectorXd vecd(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXi veci(const json& j) {
  auto v = j.get<std::vector<int>>();
  return Eigen::Map<const Eigen::VectorXi>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

PipelineConfig load_config(const std::string& path) {
  PipelineConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw gs::Error::io("EmptyFile", "cannot open config", path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw gs::Error::io("UnsupportedFormat", e.what(), path);
  }
  require_keys(j,
               {"cepstra", "pca_k", "grid", "metric", "filter", "reference",
                "solver", "seed", "history_window_s"},
               "config root");
  if (j.contains("cepstra")) {
    const auto& c = j["cepstra"];
    require_keys(c, {"window_ms", "hop_ms", "smoothing_width_hz", "n_cepstra",
                     "log_floor"},
                 "cepstra");
    cfg.cepstra.window_ms = c.value("window_ms", cfg.cepstra.window_ms);
    cfg.cepstra.hop_ms = c.value("hop_ms", cfg.cepstra.hop_ms);
    cfg.cepstra.smoothing_width_hz =
        c.value("smoothing_width_hz", cfg.cepstra.smoothing_width_hz);
    cfg.cepstra.n_cepstra = c.value("n_cepstra", cfg.cepstra.n_cepstra);
    cfg.cepstra.log_floor = c.value("log_floor", cfg.cepstra.log_floor);
    cfg.cepstra.validate();
  }
  cfg.pca_k = j.value("pca_k", cfg.pca_k);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_keys(g, {"mode", "counts", "mass_fraction", "origin", "spacing"},
                 "grid");
    cfg.grid_mode = g.value("mode", cfg.grid_mode);
    if (cfg.grid_mode != "auto" && cfg.grid_mode != "explicit")
      throw gs::Error::validation("ConfigMismatch",
                                  "grid.mode must be auto or explicit");
    if (g.contains("counts")) cfg.grid_counts = veci(g["counts"]);
    cfg.mass_fraction = g.value("mass_fraction", cfg.mass_fraction);
    if (g.contains("origin")) cfg.grid_origin = vecd(g["origin"]);
    if (g.contains("spacing")) cfg.grid_spacing = vecd(g["spacing"]);
  }
  if (j.contains("metric")) {
    const auto& m = j["metric"];
    require_keys(m, {"radius_scale", "min_samples", "cond_max", "ridge_epsilon"},
                 "metric");
    cfg.radius_scale = m.value("radius_scale", cfg.radius_scale);
    cfg.min_samples = m.value("min_samples", cfg.min_samples);
    cfg.metric.cond_max = m.value("cond_max", cfg.metric.cond_max);
    cfg.metric.ridge_epsilon =
        m.value("ridge_epsilon", cfg.metric.ridge_epsilon);
  }
  if (j.contains("filter")) {
    const auto& fl = j["filter"];
    require_keys(fl, {"low_edge_hz", "high_edge_hz", "rolloff_hz", "nyquist_hz"},
                 "filter");
    cfg.filter.low_edge_hz = fl.value("low_edge_hz", cfg.filter.low_edge_hz);
    cfg.filter.high_edge_hz = fl.value("high_edge_hz", cfg.filter.high_edge_hz);
    cfg.filter.rolloff_hz = fl.value("rolloff_hz", cfg.filter.rolloff_hz);
    cfg.filter.nyquist_hz = fl.value("nyquist_hz", cfg.filter.nyquist_hz);
    cfg.filter.validate();
  }
  if (j.contains("reference")) {
    const auto& r = j["reference"];
    require_keys(r, {"auto", "t0", "vector_times"}, "reference");
    cfg.reference_auto = r.value("auto", false);
    if (r.contains("t0")) cfg.t0 = r["t0"].get<double>();
    if (r.contains("vector_times"))
      cfg.vector_times = r["vector_times"].get<std::vector<double>>();
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    require_keys(s, {"step_frac", "tol_x_scale", "max_newton_iter",
                     "working_box_shrink"},
                 "solver");
    cfg.solver.step_frac = s.value("step_frac", cfg.solver.step_frac);
    cfg.solver.tol_x_scale = s.value("tol_x_scale", cfg.solver.tol_x_scale);
    cfg.solver.max_newton_iter =
        s.value("max_newton_iter", cfg.solver.max_newton_iter);
    cfg.solver.working_box_shrink =
        s.value("working_box_shrink", cfg.solver.working_box_shrink);
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("history_window_s") && !j["history_window_s"].is_null())
    cfg.history_window_s = j["history_window_s"].get<double>();
  return cfg;
}

// Writes through a temp file in the same directory, then renames.
template <class Fn>
void atomic_write(const std::string& path, Fn&& writer) {
  std::string tmp = path + ".tmp";
  writer(tmp);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw gs::Error::io("EmptyFile",
                        "cannot move temp file into place: " + ec.message(),
                        path);
}

std::string fmt_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_features(const std::string& wav_path, const std::string& config_path,
                 bool filter, const std::string& out,
                 std::string pca_out) {
  PipelineConfig cfg = load_config(config_path);
  gs::AudioClip clip = gs::load_wav(wav_path);
  if (clip.sample_rate_hz != 8000)
    std::cerr << "warning: sample rate " << clip.sample_rate_hz
              << " Hz (window/hop taken from ms settings)\n";
  gs::Spectrogram spec = gs::stft(clip, cfg.cepstra);
  if (filter) spec = gs::apply_channel_filter(spec, cfg.filter);
  gs::FeatureTrajectory cep = gs::cepstra(spec, cfg.cepstra);
  gs::PcaModel model = gs::fit_pca(cep, cfg.pca_k);
  gs::FeatureTrajectory traj = gs::project(cep, model);

  if (pca_out.empty()) pca_out = out + ".pca.json";
  std::vector<std::string> meta{std::string("features filter=") +
                                (filter ? "1" : "0")};
  atomic_write(out, [&](const std::string& p) {
    gs::write_trajectory_csv(p, traj, meta);
  });
  atomic_write(pca_out,
               [&](const std::string& p) { gs::write_pca_json(p, model); });
  return 0;
}

int cmd_chart(const std::string& traj_path, const std::string& config_path,
              const std::string& out, std::optional<std::uint64_t> seed_flag) {
  PipelineConfig cfg = load_config(config_path);
  gs::FeatureTrajectory traj = gs::read_trajectory_csv(traj_path).traj;

  if (cfg.history_window_s) {
    double t_end = traj.times.back();
    double t_min = t_end - *cfg.history_window_s;
    std::vector<double> times;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < traj.size(); ++i)
      if (traj.times[static_cast<std::size_t>(i)] >= t_min) {
        keep.push_back(i);
        times.push_back(traj.times[static_cast<std::size_t>(i)]);
      }
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(keep.size()), traj.dim());
    for (std::size_t i = 0; i < keep.size(); ++i)
      pts.row(static_cast<Eigen::Index>(i)) = traj.points.row(keep[i]);
    traj.times = std::move(times);
    traj.points = std::move(pts);
  }

  gs::VelocitySeries vel = gs::estimate_velocities(traj);

  Eigen::VectorXi counts = cfg.grid_counts;
  if (counts.size() == 0) {
    counts.resize(traj.dim());
    counts.setConstant(7);
    if (traj.dim() >= 2) counts[1] = 9;
  }
  gs::GridSpec grid;
  if (cfg.grid_mode == "explicit") {
    if (cfg.grid_origin.size() == 0 || cfg.grid_spacing.size() == 0)
      throw gs::Error::validation(
          "ConfigMismatch", "explicit grid needs origin and spacing");
    grid.origin = cfg.grid_origin;
    grid.spacing = cfg.grid_spacing;
    grid.counts = counts;
    grid.validate();
  } else {
    grid = gs::fit_grid_to_data(traj, counts, cfg.mass_fraction);
  }

  int min_samples =
      cfg.min_samples > 0 ? cfg.min_samples : static_cast<int>(4 * traj.dim());
  gs::MetricField field = gs::estimate_metric_grid(
      traj, vel, grid, grid.spacing * cfg.radius_scale, min_samples,
      cfg.metric);

  std::vector<double> ref_times;
  if (cfg.reference_auto) {
    ref_times = gs::suggest_reference_times(traj, vel);
  } else {
    if (!cfg.t0 ||
        static_cast<Eigen::Index>(cfg.vector_times.size()) != traj.dim())
      throw gs::Error::validation(
          "ConfigMismatch",
          "reference.t0 and reference.vector_times (one per dimension) are "
          "required unless reference.auto is set");
    ref_times.push_back(*cfg.t0);
    for (double t : cfg.vector_times) ref_times.push_back(t);
  }
  gs::ReferenceFrame frame = gs::select_reference(
      traj, vel, ref_times[0],
      std::vector<double>(ref_times.begin() + 1, ref_times.end()));

  gs::ScaleChart chart(std::move(field), std::move(frame), {}, cfg.solver);
  std::uint64_t seed = seed_flag.value_or(cfg.seed);
  gs::SelfTestReport selftest = chart.self_test(100, seed);
  if (selftest.tested < selftest.requested || !(selftest.max_err <= 1e-5)) {
    char ctx[160];
    std::snprintf(ctx, sizeof(ctx),
                  "tested=%d of %d rms=%.3g max_err=%.3g tol=1e-5",
                  selftest.tested, selftest.requested, selftest.rms,
                  selftest.max_err);
    throw gs::Error::numerical("SelfTestFailed",
                               "chart round-trip self-test failed", ctx);
  }
  atomic_write(out, [&](const std::string& p) {
    gs::save_chart_json(p, chart, &selftest);
  });
  return 0;
}

int cmd_rescale(const std::string& chart_path, const std::string& traj_path,
                const std::string& out, std::string report_path) {
  gs::ScaleChart chart = gs::load_chart_json(chart_path);
  gs::FeatureTrajectory traj = gs::read_trajectory_csv(traj_path).traj;
  gs::RescaleResult result = chart.rescale_trajectory(traj);

  std::vector<std::string> meta;
  if (!chart.frame().source_times.empty()) {
    std::string line = "source_times";
    for (double t : chart.frame().source_times) line += "," + fmt_full(t);
    meta.push_back(line);
  }
  atomic_write(out, [&](const std::string& p) {
    gs::write_trajectory_csv(p, result.s_traj, meta, "s");
  });

  if (report_path.empty()) report_path = out + ".exclusions.json";
  json rep;
  rep["total"] = traj.size();
  rep["included"] = result.s_traj.size();
  rep["excluded"] = json::array();
  for (const auto& e : result.excluded)
    rep["excluded"].push_back(
        {{"index", e.index}, {"time", e.time}, {"reason", e.reason}});
  atomic_write(report_path, [&](const std::string& p) {
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw gs::Error::io("EmptyFile", "cannot open report", p);
    f << rep.dump(2) << "\n";
  });
  if (!result.excluded.empty())
    std::cerr << "warning: " << result.excluded.size() << " of " << traj.size()
              << " points excluded (see " << report_path << ")\n";
  return 0;
}

std::vector<double> parse_levels(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  return out;
}

int cmd_isoclines(const std::string& chart_path, const std::string& out_svg,
                  const std::string& out_csv, const std::string& region_str,
                  const std::string& levels1_str,
                  const std::string& levels2_str, int resolution) {
  gs::ScaleChart chart = gs::load_chart_json(chart_path);
  if (chart.dim() != 2)
    throw gs::Error::validation("UnsupportedDimension",
                                "isoclines need a 2-D chart");

  Eigen::Vector2d lo, hi;
  if (region_str.empty()) {
    // Default region: chart domain shrunk 2% per side.
    Eigen::VectorXd dlo = chart.field().domain_lo();
    Eigen::VectorXd dhi = chart.field().domain_hi();
    for (int a = 0; a < 2; ++a) {
      double pad = 0.02 * (dhi[a] - dlo[a]);
      lo[a] = dlo[a] + pad;
      hi[a] = dhi[a] - pad;
    }
  } else {
    auto vals = parse_levels(region_str);
    if (vals.size() != 4)
      throw gs::Error::validation("ConfigMismatch",
                                  "--region needs x1lo,x1hi,x2lo,x2hi");
    lo << vals[0], vals[2];
    hi << vals[1], vals[3];
  }

  std::vector<double> levels1, levels2;
  if (!levels1_str.empty()) levels1 = parse_levels(levels1_str);
  if (!levels2_str.empty()) levels2 = parse_levels(levels2_str);
  if (levels1.empty() || levels2.empty()) {
    // Integer levels spanning the s values found on a coarse probe lattice.
    double s1min = 0, s1max = 0, s2min = 0, s2max = 0;
    bool any = false;
    for (int i = 0; i < 13; ++i)
      for (int j = 0; j < 13; ++j) {
        Eigen::VectorXd x(2);
        x[0] = lo[0] + (hi[0] - lo[0]) * i / 12.0;
        x[1] = lo[1] + (hi[1] - lo[1]) * j / 12.0;
        try {
          Eigen::VectorXd s = chart.inverse_map(x);
          if (!any) {
            s1min = s1max = s[0];
            s2min = s2max = s[1];
            any = true;
          }
          s1min = std::min(s1min, s[0]);
          s1max = std::max(s1max, s[0]);
          s2min = std::min(s2min, s[1]);
          s2max = std::max(s2max, s[1]);
        } catch (const gs::Error&) {
        }
      }
    if (!any)
      throw gs::Error::numerical("OutOfDomain",
                                 "no invertible probe point in the region");
    auto integers_between = [](double a, double b) {
      std::vector<double> v;
      for (double l = std::ceil(a); l <= std::floor(b) + 1e-12; l += 1.0)
        v.push_back(l + 0.0);  // normalizes -0
      if (v.empty()) v.push_back(0.5 * (a + b));
      return v;
    };
    if (levels1.empty()) levels1 = integers_between(s1min, s1max);
    if (levels2.empty()) levels2 = integers_between(s2min, s2max);
  }

  auto isoclines =
      gs::trace_isoclines(chart, lo, hi, levels1, levels2, resolution);

  if (!out_csv.empty()) {
    atomic_write(out_csv, [&](const std::string& p) {
      gs::write_isoclines_csv(p, isoclines);
    });
  }

  gs::SvgPlot plot(640, 520, "s isoclines");
  for (const auto& iso : isoclines)
    plot.add_polyline(iso.vertices,
                      iso.component == 1 ? "steelblue" : "firebrick", 1.2);
  plot.add_marker(
      Eigen::Vector2d(chart.frame().x0[0], chart.frame().x0[1]), "black", 4.0);
  atomic_write(out_svg, [&](const std::string& p) { plot.write(p); });
  return 0;
}

std::optional<std::vector<double>> meta_source_times(
    const std::vector<std::string>& meta) {
  for (const auto& line : meta) {
    if (line.rfind("source_times", 0) != 0) continue;
    std::vector<double> times;
    std::stringstream ss(line.substr(std::string("source_times").size()));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell.empty()) continue;
      times.push_back(std::stod(cell));
    }
    return times;
  }
  return std::nullopt;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                const std::string& out, bool force) {
  gs::TrajectoryFile a = gs::read_trajectory_csv(a_path);
  gs::TrajectoryFile b = gs::read_trajectory_csv(b_path);

  // Matched-reference guard: refuse s-trajectories built from different
  // reference times unless forced.
  auto ta = meta_source_times(a.meta);
  auto tb = meta_source_times(b.meta);
  if (ta && tb && !force) {
    bool same = ta->size() == tb->size();
    if (same)
      for (std::size_t i = 0; i < ta->size(); ++i)
        if (std::abs((*ta)[i] - (*tb)[i]) > 1e-12) same = false;
    if (!same)
      throw gs::Error::validation(
          "ConfigMismatch",
          "inputs were rescaled with different reference times; pass --force "
          "to compare anyway");
  }

  gs::ComparisonReport report = gs::compare_representations(a.traj, b.traj);
  atomic_write(out, [&](const std::string& p) {
    gs::write_report_json(p, report);
  });
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out,
              std::optional<std::uint64_t> seed_flag) {
  gs::SyntheticSpec spec = gs::read_synthetic_json(spec_path);
  if (seed_flag) spec.seed = *seed_flag;
  gs::FeatureTrajectory traj = gs::generate_synthetic(spec);
  atomic_write(out, [&](const std::string& p) {
    gs::write_trajectory_csv(p, traj);
  });
  return 0;
}

int cmd_transform(const std::string& traj_path,
                  const std::string& transform_path, const std::string& out) {
  gs::FeatureTrajectory traj = gs::read_trajectory_csv(traj_path).traj;
  gs::TransformSpec spec = gs::read_transform_json(transform_path);
  gs::FeatureTrajectory result = gs::apply_transform(traj, spec);
  atomic_write(out, [&](const std::string& p) {
    gs::write_trajectory_csv(p, result);
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geoscale: dynamic rescaling of feature trajectories into an "
      "invariant coordinate chart"};
  app.require_subcommand(1);

  std::string config_path, out, wav_path, traj_path, chart_path, a_path,
      b_path, spec_path, transform_path, pca_out, report_path, out_csv,
      region_str, levels1_str, levels2_str;
  bool filter = false, force = false;
  int resolution = 61;
  std::optional<std::uint64_t> seed_flag;
  std::uint64_t seed_value = 0;

  auto* features = app.add_subcommand("features",
                                      "WAV -> cepstral-PCA trajectory CSV");
  features->add_option("wav", wav_path, "input WAV (PCM 16-bit)")->required();
  features->add_option("--config", config_path, "pipeline config JSON");
  features->add_flag("--filter", filter,
                     "apply the band-edge channel filter before cepstra");
  features->add_option("--out", out, "output trajectory CSV")->required();
  features->add_option("--pca-out", pca_out,
                       "output PCA model JSON (default <out>.pca.json)");

  auto* chart_cmd = app.add_subcommand("chart",
                                       "trajectory CSV -> scale chart JSON");
  chart_cmd->add_option("traj", traj_path, "input trajectory CSV")->required();
  chart_cmd->add_option("--config", config_path, "pipeline config JSON");
  chart_cmd->add_option("--out", out, "output chart JSON")->required();
  auto* chart_seed =
      chart_cmd->add_option("--seed", seed_value, "self-test RNG seed");

  auto* rescale = app.add_subcommand("rescale",
                                     "map a trajectory into s coordinates");
  rescale->add_option("chart", chart_path, "chart JSON")->required();
  rescale->add_option("traj", traj_path, "trajectory CSV")->required();
  rescale->add_option("--out", out, "output s-trajectory CSV")->required();
  rescale->add_option("--report", report_path,
                      "exclusion report JSON (default <out>.exclusions.json)");

  auto* iso = app.add_subcommand("isoclines",
                                 "render s isoclines from a chart");
  iso->add_option("chart", chart_path, "chart JSON")->required();
  iso->add_option("--out", out, "output SVG")->required();
  iso->add_option("--csv", out_csv, "also write isocline vertices CSV");
  iso->add_option("--region", region_str, "x1lo,x1hi,x2lo,x2hi");
  iso->add_option("--levels1", levels1_str, "comma-separated s1 levels");
  iso->add_option("--levels2", levels2_str, "comma-separated s2 levels");
  iso->add_option("--resolution", resolution, "lattice resolution (default 61)");

  auto* cmp = app.add_subcommand("compare", "compare two trajectory CSVs");
  cmp->add_option("a", a_path, "first CSV")->required();
  cmp->add_option("b", b_path, "second CSV")->required();
  cmp->add_option("--out", out, "report JSON")->required();
  cmp->add_flag("--force", force, "skip the matched-reference guard");

  auto* synth = app.add_subcommand("synth", "generate a synthetic trajectory");
  synth->add_option("spec", spec_path, "synthetic spec JSON")->required();
  synth->add_option("--out", out, "output CSV")->required();
  auto* synth_seed = synth->add_option("--seed", seed_value, "override seed");

  auto* trans = app.add_subcommand("transform",
                                   "apply an invertible transform to a CSV");
  trans->add_option("traj", traj_path, "input CSV")->required();
  trans->add_option("transform", transform_path, "transform JSON")->required();
  trans->add_option("--out", out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (features->parsed())
      return cmd_features(wav_path, config_path, filter, out, pca_out);
    if (chart_cmd->parsed()) {
      if (chart_seed->count() > 0) seed_flag = seed_value;
      return cmd_chart(traj_path, config_path, out, seed_flag);
    }
    if (rescale->parsed())
      return cmd_rescale(chart_path, traj_path, out, report_path);
    if (iso->parsed())
      return cmd_isoclines(chart_path, out, out_csv, region_str, levels1_str,
                           levels2_str, resolution);
    if (cmp->parsed()) return cmd_compare(a_path, b_path, out, force);
    if (synth->parsed()) {
      if (synth_seed->count() > 0) seed_flag = seed_value;
      return cmd_synth(spec_path, out, seed_flag);
    }
    if (trans->parsed())
      return cmd_transform(traj_path, transform_path, out);
  } catch (const gs::Error& e) {
    json err{{"kind", gs::to_string(e.kind())},
             {"message", e.what()},
             {"context", e.context()}};
    std::cerr << err.dump() << "\n";
    switch (e.kind()) {
      case gs::ErrorKind::io: return 2;
      case gs::ErrorKind::validation: return 3;
      case gs::ErrorKind::numerical: return 4;
    }
    return 4;
  } catch (const std::exception& e) {
    json err{{"kind", "numerical"}, {"message", e.what()}, {"context", ""}};
    std::cerr << err.dump() << "\n";
    return 4;
  }
  return 0;
}
