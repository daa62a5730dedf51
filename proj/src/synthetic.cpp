#include "geoscale/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "geoscale/error.hpp"

namespace geoscale {

namespace {

constexpr double kPi = std::numbers::pi;

// Uniform/normal draws built directly on the mt19937_64 word stream so the
// sample sequence is fixed by this code, not by library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

void SyntheticSpec::validate() const {
  if (box_lo.size() < 1 || box_hi.size() != box_lo.size())
    throw Error::validation("DimensionMismatch", "synthetic box shape");
  for (Eigen::Index a = 0; a < box_lo.size(); ++a)
    if (!(box_lo[a] < box_hi[a]))
      throw Error::validation("DimensionMismatch", "empty synthetic box");
  if (!(duration_s > 0) || !(sample_rate_hz > 0))
    throw Error::validation("DimensionMismatch",
                            "duration and rate must be positive");
  if (!(step_frac > 0) || !(smoothing >= 0) || !(smoothing < 1))
    throw Error::validation("DimensionMismatch", "bad noise-walk shaping");
}

FeatureTrajectory generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Eigen::Index dim = spec.box_lo.size();
  const auto n = static_cast<Eigen::Index>(
      std::floor(spec.duration_s * spec.sample_rate_hz));
  if (n < 3)
    throw Error::validation("DimensionMismatch",
                            "synthetic trajectory too short");
  const double dt = 1.0 / spec.sample_rate_hz;

  FeatureTrajectory traj;
  traj.times.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    traj.times[static_cast<std::size_t>(i)] = i * dt;
  traj.points.resize(n, dim);

  Rng rng(spec.seed);
  Eigen::VectorXd center = 0.5 * (spec.box_lo + spec.box_hi);
  Eigen::VectorXd half = 0.5 * (spec.box_hi - spec.box_lo);

  if (spec.kind == SyntheticSpec::Kind::lissajous) {
    // Two incommensurate tones per axis; weights sum to 1 so the curve
    // stays inside the box.
    for (Eigen::Index a = 0; a < dim; ++a) {
      double f1 = 0.137 * std::sqrt(2.0 + a);
      double f2 = 0.059 * std::sqrt(5.0 + 2.0 * a);
      double p1 = 2.0 * kPi * rng.uniform();
      double p2 = 2.0 * kPi * rng.uniform();
      for (Eigen::Index i = 0; i < n; ++i) {
        double t = traj.times[static_cast<std::size_t>(i)];
        traj.points(i, a) =
            center[a] + half[a] * (0.65 * std::sin(2.0 * kPi * f1 * t + p1) +
                                   0.35 * std::sin(2.0 * kPi * f2 * t + p2));
      }
    }
    return traj;
  }

  // Reflected noise walk with one-pole smoothed Gaussian increments.
  Eigen::VectorXd x = center;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  const double rho = spec.smoothing;
  const double drive = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    traj.points.row(i) = x.transpose();
    for (Eigen::Index a = 0; a < dim; ++a) {
      v[a] = rho * v[a] + drive * rng.normal();
      x[a] += spec.step_frac * half[a] * v[a];
      // Reflect at the walls.
      if (x[a] > spec.box_hi[a]) {
        x[a] = 2.0 * spec.box_hi[a] - x[a];
        v[a] = -v[a];
      }
      if (x[a] < spec.box_lo[a]) {
        x[a] = 2.0 * spec.box_lo[a] - x[a];
        v[a] = -v[a];
      }
      // Extremely long excursions cannot occur with step_frac << 1, but
      // keep the state inside the box regardless.
      x[a] = std::clamp(x[a], spec.box_lo[a], spec.box_hi[a]);
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------

void TransformSpec::validate(Eigen::Index dim) const {
  const bool has_linear =
      kind == Kind::linear || kind == Kind::composite || matrix.size() > 0;
  if (has_linear && matrix.size() > 0) {
    if (matrix.rows() != dim || matrix.cols() != dim)
      throw Error::validation("DimensionMismatch", "transform matrix shape");
    double det = matrix.determinant();
    if (!(std::abs(det) > 1e-9))
      throw Error::validation("DimensionMismatch",
                              "transform matrix is (near) singular");
  }
  if (offset.size() > 0 && offset.size() != dim)
    throw Error::validation("DimensionMismatch", "transform offset shape");
  if (kind == Kind::monotone_warp || kind == Kind::composite) {
    if (warp_alpha.size() != dim || warp_beta.size() != dim ||
        warp_gamma.size() != dim || warp_c.size() != dim)
      throw Error::validation("DimensionMismatch", "warp parameter shape");
    for (Eigen::Index a = 0; a < dim; ++a) {
      if (!(warp_alpha[a] - std::abs(warp_beta[a] * warp_gamma[a]) > 0))
        throw Error::validation(
            "DimensionMismatch",
            "warp derivative not strictly positive (alpha - |beta*gamma| <= 0)");
    }
  }
  if (box_lo.size() != box_hi.size())
    throw Error::validation("DimensionMismatch", "transform box shape");
}

namespace {

double warp_axis(const TransformSpec& t, Eigen::Index a, double x) {
  return t.warp_c[a] + t.warp_alpha[a] * x +
         t.warp_beta[a] * std::tanh(t.warp_gamma[a] * x);
}

double unwarp_axis(const TransformSpec& t, Eigen::Index a, double y) {
  // Strictly increasing; bracket then bisect.
  double slope_min = t.warp_alpha[a] - std::abs(t.warp_beta[a] * t.warp_gamma[a]);
  double guess = (y - t.warp_c[a]) / t.warp_alpha[a];
  double radius = std::max(1.0, std::abs(t.warp_beta[a]) / slope_min);
  double lo = guess - radius, hi = guess + radius;
  while (warp_axis(t, a, lo) > y) lo -= radius;
  while (warp_axis(t, a, hi) < y) hi += radius;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (warp_axis(t, a, mid) < y)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Eigen::VectorXd TransformSpec::apply_point(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  if (matrix.size() > 0) y = matrix * y;
  if (offset.size() > 0) y += offset;
  if (kind == Kind::monotone_warp || kind == Kind::composite) {
    for (Eigen::Index a = 0; a < y.size(); ++a) y[a] = warp_axis(*this, a, y[a]);
  }
  return y;
}

Eigen::VectorXd TransformSpec::invert_point(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x = y;
  if (kind == Kind::monotone_warp || kind == Kind::composite) {
    for (Eigen::Index a = 0; a < x.size(); ++a)
      x[a] = unwarp_axis(*this, a, x[a]);
  }
  if (offset.size() > 0) x -= offset;
  if (matrix.size() > 0) x = matrix.partialPivLu().solve(x);
  return x;
}

FeatureTrajectory apply_transform(const FeatureTrajectory& traj,
                                  const TransformSpec& spec) {
  traj.validate();
  spec.validate(traj.dim());
  if (spec.box_lo.size() > 0) {
    for (Eigen::Index i = 0; i < traj.size(); ++i)
      for (Eigen::Index a = 0; a < traj.dim(); ++a)
        if (traj.points(i, a) < spec.box_lo[a] ||
            traj.points(i, a) > spec.box_hi[a])
          throw Error::validation("OutOfBox",
                                  "trajectory leaves the transform's box");
  }
  FeatureTrajectory out;
  out.times = traj.times;
  out.points.resize(traj.size(), traj.dim());
  for (Eigen::Index i = 0; i < traj.size(); ++i)
    out.points.row(i) =
        spec.apply_point(traj.points.row(i).transpose()).transpose();
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

nlohmann::json load_json_file(const std::string& path) {
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

}  // namespace

TransformSpec read_transform_json(const std::string& path) {
  nlohmann::json j = load_json_file(path);
  TransformSpec spec;
  std::string kind = j.value("kind", "linear");
  if (kind == "linear")
    spec.kind = TransformSpec::Kind::linear;
  else if (kind == "monotone-warp")
    spec.kind = TransformSpec::Kind::monotone_warp;
  else if (kind == "composite")
    spec.kind = TransformSpec::Kind::composite;
  else
    throw Error::validation("DimensionMismatch",
                            "unknown transform kind: " + kind, path);
  if (j.contains("matrix")) {
    auto rows = j["matrix"].get<std::vector<std::vector<double>>>();
    spec.matrix.resize(static_cast<Eigen::Index>(rows.size()),
                       rows.empty() ? 0
                                    : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size())
        throw Error::validation("DimensionMismatch", "ragged matrix", path);
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        spec.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rows[r][c];
    }
  }
  if (j.contains("offset")) spec.offset = vec_from_json(j["offset"]);
  if (j.contains("warp")) {
    const auto& w = j["warp"];
    spec.warp_c = vec_from_json(w.at("c"));
    spec.warp_alpha = vec_from_json(w.at("alpha"));
    spec.warp_beta = vec_from_json(w.at("beta"));
    spec.warp_gamma = vec_from_json(w.at("gamma"));
  }
  if (j.contains("box")) {
    spec.box_lo = vec_from_json(j["box"].at("lo"));
    spec.box_hi = vec_from_json(j["box"].at("hi"));
  }
  return spec;
}

SyntheticSpec read_synthetic_json(const std::string& path) {
  nlohmann::json j = load_json_file(path);
  SyntheticSpec spec;
  std::string kind = j.value("kind", "noise-walk");
  if (kind == "lissajous")
    spec.kind = SyntheticSpec::Kind::lissajous;
  else if (kind == "noise-walk")
    spec.kind = SyntheticSpec::Kind::noise_walk;
  else
    throw Error::validation("DimensionMismatch",
                            "unknown synthetic kind: " + kind, path);
  spec.duration_s = j.value("duration_s", 100.0);
  spec.sample_rate_hz = j.value("sample_rate_hz", 100.0);
  spec.seed = j.value("seed", std::uint64_t{1});
  spec.step_frac = j.value("step_frac", 0.01);
  spec.smoothing = j.value("smoothing", 0.9);
  spec.box_lo = vec_from_json(j.at("box").at("lo"));
  spec.box_hi = vec_from_json(j.at("box").at("hi"));
  spec.validate();
  return spec;
}

}  // namespace geoscale
