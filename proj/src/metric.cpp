#include "geoscale/metric.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "geoscale/error.hpp"
#include "geoscale/kernels.hpp"

namespace geoscale {

namespace {

constexpr double kEigFloorScale = 1e-9;

// Catmull-Rom weights for the stencil {-1, 0, 1, 2} at local u in [0, 1].
void cubic_weights(double u, double* w, double* dw) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  w[0] = -0.5 * u3 + u2 - 0.5 * u;
  w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  w[3] = 0.5 * u3 - 0.5 * u2;
  if (dw != nullptr) {
    dw[0] = -1.5 * u2 + 2.0 * u - 0.5;
    dw[1] = 4.5 * u2 - 5.0 * u;
    dw[2] = -4.5 * u2 + 4.0 * u + 0.5;
    dw[3] = 1.5 * u2 - u;
  }
}

Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& m, double floor,
                                  bool* clamped) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.eigenvalues().minCoeff() >= floor) {
    *clamped = false;
    return m;
  }
  *clamped = true;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Eigen::Index GridSpec::num_nodes() const {
  Eigen::Index n = 1;
  for (Eigen::Index a = 0; a < counts.size(); ++a) n *= counts[a];
  return n;
}

Eigen::Index GridSpec::flat_index(const Eigen::VectorXi& idx) const {
  Eigen::Index flat = 0;
  for (Eigen::Index a = 0; a < counts.size(); ++a)
    flat = flat * counts[a] + idx[a];
  return flat;
}

Eigen::VectorXi GridSpec::multi_index(Eigen::Index flat) const {
  Eigen::VectorXi idx(counts.size());
  for (Eigen::Index a = counts.size() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % counts[a]);
    flat /= counts[a];
  }
  return idx;
}

Eigen::VectorXd GridSpec::node_point(const Eigen::VectorXi& idx) const {
  Eigen::VectorXd p(origin.size());
  for (Eigen::Index a = 0; a < origin.size(); ++a)
    p[a] = origin[a] + spacing[a] * idx[a];
  return p;
}

void GridSpec::validate() const {
  if (origin.size() < 1 || spacing.size() != origin.size() ||
      counts.size() != origin.size())
    throw Error::validation("DimensionMismatch", "grid spec shape mismatch");
  for (Eigen::Index a = 0; a < origin.size(); ++a) {
    if (!(spacing[a] > 0))
      throw Error::validation("DimensionMismatch", "grid spacing must be > 0");
    if (counts[a] < 2)
      throw Error::validation("DimensionMismatch",
                              "grid needs at least 2 nodes per axis");
  }
}

// ---------------------------------------------------------------------------
// Construction

MetricField MetricField::from_samples(GridSpec grid,
                                      std::vector<Eigen::MatrixXd> g_samples,
                                      std::vector<std::uint8_t> valid) {
  grid.validate();
  const Eigen::Index n_nodes = grid.num_nodes();
  const Eigen::Index dim = grid.dim();
  if (static_cast<Eigen::Index>(g_samples.size()) != n_nodes ||
      static_cast<Eigen::Index>(valid.size()) != n_nodes)
    throw Error::validation("DimensionMismatch",
                            "sample/validity arrays do not match the grid");

  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    if (!valid[static_cast<std::size_t>(i)]) continue;
    const Eigen::MatrixXd& g = g_samples[static_cast<std::size_t>(i)];
    if (g.rows() != dim || g.cols() != dim)
      throw Error::validation("DimensionMismatch", "metric sample shape");
    double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error::validation("DimensionMismatch",
                              "metric sample not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (!(es.eigenvalues().minCoeff() > 0))
      throw Error::validation("DimensionMismatch",
                              "metric sample not positive definite");
  }

  MetricField field;
  field.grid_ = std::move(grid);
  field.samples_ = std::move(g_samples);
  field.valid_ = std::move(valid);
  field.build_interpolant();
  return field;
}

// Finds the largest (most nodes) axis-aligned block of valid nodes with at
// least 2 nodes per axis, then pads it with one ghost layer per side so the
// cubic stencil is defined across the whole block.
void MetricField::build_interpolant() {
  const Eigen::Index dim = grid_.dim();

  Eigen::VectorXi best_lo(dim), best_hi(dim);
  long best_volume = 0;
  Eigen::VectorXi lo(dim), hi(dim);

  // Exhaustive range search; grids here are small (tens of nodes per axis).
  std::function<void(Eigen::Index)> recurse = [&](Eigen::Index axis) {
    if (axis == dim) {
      Eigen::VectorXi idx = lo;
      long volume = 1;
      for (Eigen::Index a = 0; a < dim; ++a) volume *= hi[a] - lo[a] + 1;
      if (volume <= best_volume) return;
      // Check all nodes in the candidate block.
      while (true) {
        if (!valid_[static_cast<std::size_t>(grid_.flat_index(idx))]) return;
        Eigen::Index a = dim - 1;
        while (a >= 0) {
          if (++idx[a] <= hi[a]) break;
          idx[a] = lo[a];
          --a;
        }
        if (a < 0) break;
      }
      best_volume = volume;
      best_lo = lo;
      best_hi = hi;
      return;
    }
    for (int l = 0; l + 1 < grid_.counts[axis]; ++l)
      for (int h = l + 1; h < grid_.counts[axis]; ++h) {
        lo[axis] = l;
        hi[axis] = h;
        recurse(axis + 1);
      }
  };
  recurse(0);

  if (best_volume == 0)
    throw Error::numerical("NoValidNodes",
                           "no 2x...x2 block of valid metric nodes");

  block_lo_ = best_lo;
  block_hi_ = best_hi;
  domain_lo_.resize(dim);
  domain_hi_.resize(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    domain_lo_[a] = grid_.origin[a] + grid_.spacing[a] * block_lo_[a];
    domain_hi_[a] = grid_.origin[a] + grid_.spacing[a] * block_hi_[a];
  }

  padded_counts_.resize(dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    padded_counts_[a] = block_hi_[a] - block_lo_[a] + 3;

  Eigen::Index padded_nodes = 1;
  for (Eigen::Index a = 0; a < dim; ++a) padded_nodes *= padded_counts_[a];

  const Eigen::Index n_comp = dim * (dim + 1) / 2;
  padded_.assign(static_cast<std::size_t>(n_comp),
                 std::vector<double>(static_cast<std::size_t>(padded_nodes), 0.0));

  auto padded_flat = [&](const Eigen::VectorXi& idx) {
    Eigen::Index flat = 0;
    for (Eigen::Index a = 0; a < dim; ++a) flat = flat * padded_counts_[a] + idx[a];
    return flat;
  };

  // Interior copy (padded index = block index + 1).
  Eigen::VectorXi bidx = Eigen::VectorXi::Zero(dim);
  while (true) {
    Eigen::VectorXi gidx = block_lo_ + bidx;
    const Eigen::MatrixXd& g = samples_[static_cast<std::size_t>(grid_.flat_index(gidx))];
    Eigen::VectorXi pidx = bidx + Eigen::VectorXi::Ones(dim);
    Eigen::Index flat = padded_flat(pidx);
    Eigen::Index c = 0;
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index s = r; s < dim; ++s)
        padded_[static_cast<std::size_t>(c++)][static_cast<std::size_t>(flat)] =
            0.5 * (g(r, s) + g(s, r));
    Eigen::Index a = dim - 1;
    while (a >= 0) {
      if (++bidx[a] <= block_hi_[a] - block_lo_[a]) break;
      bidx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }

  // Ghost layers, one axis at a time. Quadratic extrapolation when three
  // interior nodes exist along the axis, linear otherwise.
  for (Eigen::Index axis = 0; axis < dim; ++axis) {
    const int pc = padded_counts_[axis];
    const int interior = pc - 2;
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(dim);
    // Iterate every position of the other axes that is already filled:
    // full padded range for axes < axis, interior range for axes > axis.
    std::function<void(Eigen::Index)> fill = [&](Eigen::Index a) {
      if (a == dim) {
        auto at = [&](int along) {
          idx[axis] = along;
          return padded_flat(idx);
        };
        for (auto& comp : padded_) {
          double f1 = comp[static_cast<std::size_t>(at(1))];
          double f2 = comp[static_cast<std::size_t>(at(2))];
          double lo_ghost, hi_ghost;
          if (interior >= 3) {
            double f3 = comp[static_cast<std::size_t>(at(3))];
            lo_ghost = 3.0 * f1 - 3.0 * f2 + f3;
            double g1 = comp[static_cast<std::size_t>(at(pc - 2))];
            double g2 = comp[static_cast<std::size_t>(at(pc - 3))];
            double g3 = comp[static_cast<std::size_t>(at(pc - 4))];
            hi_ghost = 3.0 * g1 - 3.0 * g2 + g3;
          } else {
            lo_ghost = 2.0 * f1 - f2;
            double g1 = comp[static_cast<std::size_t>(at(pc - 2))];
            double g2 = comp[static_cast<std::size_t>(at(pc - 3))];
            hi_ghost = 2.0 * g1 - g2;
          }
          comp[static_cast<std::size_t>(at(0))] = lo_ghost;
          comp[static_cast<std::size_t>(at(pc - 1))] = hi_ghost;
        }
        return;
      }
      if (a == axis) {
        fill(a + 1);
        return;
      }
      int lo_i = (a < axis) ? 0 : 1;
      int hi_i = (a < axis) ? padded_counts_[a] - 1 : padded_counts_[a] - 2;
      for (int i = lo_i; i <= hi_i; ++i) {
        idx[a] = i;
        fill(a + 1);
      }
    };
    fill(0);
  }
}

bool MetricField::contains(const Eigen::VectorXd& point) const {
  if (point.size() != grid_.dim()) return false;
  for (Eigen::Index a = 0; a < grid_.dim(); ++a) {
    if (!(point[a] >= domain_lo_[a] && point[a] <= domain_hi_[a])) return false;
    if (!std::isfinite(point[a])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Interpolation

void MetricField::patch_2d(const double* point, double* value,
                           double* grad) const {
  // Bounds checked by the caller via contains(); re-check cheaply here so a
  // stray query cannot read out of the padded arrays.
  for (int a = 0; a < 2; ++a)
    if (!(point[a] >= domain_lo_[a] && point[a] <= domain_hi_[a]))
      throw Error::numerical("OutOfDomain",
                             "query outside the metric's valid region");
  int cell[2];
  double w[2][4], dw[2][4];
  for (int a = 0; a < 2; ++a) {
    const int n_cells = padded_counts_[a] - 3;
    double t = (point[a] - domain_lo_[a]) / grid_.spacing[a];
    int c = static_cast<int>(std::floor(t));
    if (c < 0) c = 0;
    if (c > n_cells - 1) c = n_cells - 1;
    cubic_weights(t - c, w[a], grad ? dw[a] : nullptr);
    cell[a] = c;
  }
  const int pc1 = padded_counts_[1];
  const int base = cell[0] * pc1 + cell[1];
  for (int comp = 0; comp < 3; ++comp) {
    const double* data = padded_[static_cast<std::size_t>(comp)].data();
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double* row = data + base + i * pc1;
      double rv = 0.0, rg = 0.0;
      for (int j = 0; j < 4; ++j) {
        rv += w[1][j] * row[j];
        if (grad) rg += dw[1][j] * row[j];
      }
      v += w[0][i] * rv;
      if (grad) {
        gx += dw[0][i] * rv;
        gy += w[0][i] * rg;
      }
    }
    value[comp] = v;
    if (grad) {
      grad[comp * 2 + 0] = gx / grid_.spacing[0];
      grad[comp * 2 + 1] = gy / grid_.spacing[1];
    }
  }
}

void MetricField::interpolate_components(const Eigen::VectorXd& point,
                                         double* value, double* grad) const {
  if (!contains(point))
    throw Error::numerical("OutOfDomain",
                           "query outside the metric's valid region");
  const Eigen::Index dim = grid_.dim();
  const Eigen::Index n_comp = dim * (dim + 1) / 2;

  if (dim == 2) {
    patch_2d(point.data(), value, grad);
    return;
  }

  // Per-axis cell index within the valid block and stencil weights.
  std::vector<int> cell(static_cast<std::size_t>(dim));
  std::vector<std::array<double, 4>> w(static_cast<std::size_t>(dim));
  std::vector<std::array<double, 4>> dw(static_cast<std::size_t>(dim));
  for (Eigen::Index a = 0; a < dim; ++a) {
    const int n_cells = padded_counts_[a] - 3;  // valid nodes - 1
    double t = (point[a] - domain_lo_[a]) / grid_.spacing[a];
    int c = static_cast<int>(std::floor(t));
    if (c < 0) c = 0;
    if (c > n_cells - 1) c = n_cells - 1;
    double u = t - c;
    cubic_weights(u, w[static_cast<std::size_t>(a)].data(),
                  grad ? dw[static_cast<std::size_t>(a)].data() : nullptr);
    cell[static_cast<std::size_t>(a)] = c;
  }

  // Generic dimension: walk the 4^N stencil.
  std::vector<int> offs(static_cast<std::size_t>(dim), 0);
  for (Eigen::Index comp = 0; comp < n_comp; ++comp) {
    value[comp] = 0.0;
    if (grad)
      for (Eigen::Index a = 0; a < dim; ++a) grad[comp * dim + a] = 0.0;
  }
  while (true) {
    Eigen::Index flat = 0;
    for (Eigen::Index a = 0; a < dim; ++a)
      flat = flat * padded_counts_[a] +
             (cell[static_cast<std::size_t>(a)] + offs[static_cast<std::size_t>(a)]);
    double wprod = 1.0;
    for (Eigen::Index a = 0; a < dim; ++a)
      wprod *= w[static_cast<std::size_t>(a)]
                [static_cast<std::size_t>(offs[static_cast<std::size_t>(a)])];
    for (Eigen::Index comp = 0; comp < n_comp; ++comp) {
      double f = padded_[static_cast<std::size_t>(comp)][static_cast<std::size_t>(flat)];
      value[comp] += wprod * f;
      if (grad) {
        for (Eigen::Index a = 0; a < dim; ++a) {
          double p = 1.0;
          for (Eigen::Index b = 0; b < dim; ++b) {
            const auto ob = static_cast<std::size_t>(offs[static_cast<std::size_t>(b)]);
            p *= (b == a) ? dw[static_cast<std::size_t>(b)][ob]
                          : w[static_cast<std::size_t>(b)][ob];
          }
          grad[comp * dim + a] += p * f / grid_.spacing[a];
        }
      }
    }
    Eigen::Index a = dim - 1;
    while (a >= 0) {
      if (++offs[static_cast<std::size_t>(a)] < 4) break;
      offs[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
}

Eigen::MatrixXd MetricField::metric_at(const Eigen::VectorXd& point) const {
  const Eigen::Index dim = grid_.dim();
  std::vector<double> comps(static_cast<std::size_t>(dim * (dim + 1) / 2));
  interpolate_components(point, comps.data(), nullptr);
  Eigen::MatrixXd g(dim, dim);
  Eigen::Index c = 0;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index s = r; s < dim; ++s) {
      g(r, s) = comps[static_cast<std::size_t>(c)];
      g(s, r) = comps[static_cast<std::size_t>(c)];
      ++c;
    }
  double floor = kEigFloorScale * std::max(g.trace(), 1e-300);
  bool clamped = false;
  Eigen::MatrixXd out = floor_eigenvalues(g, floor, &clamped);
  if (clamped) clamp_count_->fetch_add(1);
  return out;
}

Eigen::MatrixXd MetricField::metric_inverse_at(
    const Eigen::VectorXd& point) const {
  Eigen::MatrixXd g = metric_at(point);
  return g.inverse();
}

Christoffel MetricField::christoffel_at(const Eigen::VectorXd& point) const {
  const Eigen::Index dim = grid_.dim();
  if (dim == 2) {
    if (!contains(point))
      throw Error::numerical("OutOfDomain",
                             "query outside the metric's valid region");
    double packed[8];
    christoffel_at_2d(point.data(), packed);
    Christoffel gamma(2, Eigen::MatrixXd(2, 2));
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m)
          gamma[static_cast<std::size_t>(k)](l, m) = packed[k * 4 + l * 2 + m];
    return gamma;
  }
  const Eigen::Index n_comp = dim * (dim + 1) / 2;
  std::vector<double> comps(static_cast<std::size_t>(n_comp));
  std::vector<double> grads(static_cast<std::size_t>(n_comp * dim));
  interpolate_components(point, comps.data(), grads.data());

  Eigen::MatrixXd g(dim, dim);
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(dim),
                                  Eigen::MatrixXd(dim, dim));
  Eigen::Index c = 0;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index s = r; s < dim; ++s) {
      g(r, s) = g(s, r) = comps[static_cast<std::size_t>(c)];
      for (Eigen::Index a = 0; a < dim; ++a) {
        double d = grads[static_cast<std::size_t>(c * dim + a)];
        dg[static_cast<std::size_t>(a)](r, s) = d;
        dg[static_cast<std::size_t>(a)](s, r) = d;
      }
      ++c;
    }

  double floor = kEigFloorScale * std::max(g.trace(), 1e-300);
  bool clamped = false;
  Eigen::MatrixXd g_safe = floor_eigenvalues(g, floor, &clamped);
  if (clamped) clamp_count_->fetch_add(1);
  Eigen::MatrixXd ginv = g_safe.inverse();

  Christoffel gamma(static_cast<std::size_t>(dim),
                    Eigen::MatrixXd::Zero(dim, dim));
  for (Eigen::Index l = 0; l < dim; ++l)
    for (Eigen::Index m = l; m < dim; ++m) {
      for (Eigen::Index k = 0; k < dim; ++k) {
        double acc = 0.0;
        for (Eigen::Index n = 0; n < dim; ++n) {
          acc += ginv(k, n) *
                 (dg[static_cast<std::size_t>(l)](n, m) +
                  dg[static_cast<std::size_t>(m)](n, l) -
                  dg[static_cast<std::size_t>(n)](l, m));
        }
        double v = 0.5 * acc;
        gamma[static_cast<std::size_t>(k)](l, m) = v;
        gamma[static_cast<std::size_t>(k)](m, l) = v;
      }
    }
  return gamma;
}

void MetricField::christoffel_at_2d(const double* point, double* gamma) const {
  double comps[3];
  double grads[6];
  patch_2d(point, comps, grads);

  const double g00 = comps[0], g01 = comps[1], g11 = comps[2];
  const double tr = g00 + g11;
  const double det = g00 * g11 - g01 * g01;
  const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  const double eig_min = 0.5 * tr - disc;
  const double floor = kEigFloorScale * std::max(tr, 1e-300);

  double i00, i01, i11;
  if (eig_min >= floor) {
    const double inv_det = 1.0 / det;
    i00 = g11 * inv_det;
    i01 = -g01 * inv_det;
    i11 = g00 * inv_det;
  } else {
    // Rare: floor the eigenvalues through the generic path.
    Eigen::MatrixXd g(2, 2);
    g << g00, g01, g01, g11;
    bool clamped = false;
    Eigen::MatrixXd safe = floor_eigenvalues(g, floor, &clamped);
    if (clamped) clamp_count_->fetch_add(1);
    Eigen::MatrixXd inv = safe.inverse();
    i00 = inv(0, 0);
    i01 = inv(0, 1);
    i11 = inv(1, 1);
  }

  // dg[a][r][s]: grads holds d(g00), d(g01), d(g11) by axis.
  auto dg = [&](int a, int r, int s) {
    int comp = (r == 0 && s == 0) ? 0 : (r == 1 && s == 1) ? 2 : 1;
    return grads[comp * 2 + a];
  };
  for (int l = 0; l < 2; ++l)
    for (int m = l; m < 2; ++m) {
      double t0 = 0.0, t1 = 0.0;  // T_n = d_l g_{nm} + d_m g_{nl} - d_n g_{lm}
      t0 = dg(l, 0, m) + dg(m, 0, l) - dg(0, l, m);
      t1 = dg(l, 1, m) + dg(m, 1, l) - dg(1, l, m);
      double gamma0 = 0.5 * (i00 * t0 + i01 * t1);
      double gamma1 = 0.5 * (i01 * t0 + i11 * t1);
      gamma[0 * 4 + l * 2 + m] = gamma0;
      gamma[0 * 4 + m * 2 + l] = gamma0;
      gamma[1 * 4 + l * 2 + m] = gamma1;
      gamma[1 * 4 + m * 2 + l] = gamma1;
    }
}

double MetricField::curvature_scalar_at(const Eigen::VectorXd& point) const {
  const Eigen::Index dim = grid_.dim();
  if (dim != 2)
    throw Error::validation("UnsupportedDimension",
                            "scalar curvature implemented for N = 2 only");

  // Central differences of the Christoffel symbols at half-spacing.
  Eigen::VectorXd delta = grid_.spacing * 0.5;
  for (Eigen::Index a = 0; a < dim; ++a) {
    Eigen::VectorXd lo = point, hi = point;
    lo[a] -= delta[a];
    hi[a] += delta[a];
    if (!contains(lo) || !contains(hi))
      throw Error::numerical("OutOfDomain",
                             "curvature stencil leaves the valid region");
  }

  Christoffel gamma = christoffel_at(point);
  std::vector<Christoffel> dgamma;
  dgamma.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index a = 0; a < dim; ++a) {
    Eigen::VectorXd lo = point, hi = point;
    lo[a] -= delta[a];
    hi[a] += delta[a];
    Christoffel gl = christoffel_at(lo);
    Christoffel gh = christoffel_at(hi);
    Christoffel d(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k)
      d[static_cast<std::size_t>(k)] =
          (gh[static_cast<std::size_t>(k)] - gl[static_cast<std::size_t>(k)]) /
          (2.0 * delta[a]);
    dgamma.push_back(std::move(d));
  }

  // R^k_{l m n} = d_m Gamma^k_{n l} - d_n Gamma^k_{m l}
  //            + Gamma^k_{m a} Gamma^a_{n l} - Gamma^k_{n a} Gamma^a_{m l}
  auto riemann = [&](Eigen::Index k, Eigen::Index l, Eigen::Index m,
                     Eigen::Index n) {
    double r = dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)](n, l) -
               dgamma[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)](m, l);
    for (Eigen::Index a = 0; a < dim; ++a) {
      r += gamma[static_cast<std::size_t>(k)](m, a) *
               gamma[static_cast<std::size_t>(a)](n, l) -
           gamma[static_cast<std::size_t>(k)](n, a) *
               gamma[static_cast<std::size_t>(a)](m, l);
    }
    return r;
  };

  Eigen::MatrixXd ricci(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l)
    for (Eigen::Index n = 0; n < dim; ++n) {
      double acc = 0.0;
      for (Eigen::Index m = 0; m < dim; ++m) acc += riemann(m, l, m, n);
      ricci(l, n) = acc;
    }
  Eigen::MatrixXd ginv = metric_inverse_at(point);
  return (ginv.array() * ricci.array()).sum();
}

// ---------------------------------------------------------------------------
// Estimation

MetricField estimate_metric_grid(const FeatureTrajectory& traj,
                                 const VelocitySeries& vel,
                                 const GridSpec& grid,
                                 const Eigen::VectorXd& radius,
                                 int min_samples,
                                 const MetricEstimationOptions& opts) {
  traj.validate();
  grid.validate();
  const Eigen::Index dim = grid.dim();
  if (traj.dim() != dim || vel.velocities.cols() != dim ||
      vel.velocities.rows() != traj.size())
    throw Error::validation("DimensionMismatch",
                            "trajectory/velocity/grid dimensions disagree");
  if (radius.size() != dim || !(radius.minCoeff() > 0))
    throw Error::validation("DimensionMismatch",
                            "radius must be positive per axis");
  if (min_samples < dim)
    throw Error::validation("DimensionMismatch",
                            "min_samples must be at least the dimension");

  const Eigen::Index n_nodes = grid.num_nodes();
  const Eigen::Index n_samples = traj.size();
  std::vector<Eigen::MatrixXd> samples(static_cast<std::size_t>(n_nodes),
                                       Eigen::MatrixXd::Zero(dim, dim));
  std::vector<std::uint8_t> valid(static_cast<std::size_t>(n_nodes), 0);

  bool any_valid = false;
  for (Eigen::Index flat = 0; flat < n_nodes; ++flat) {
    Eigen::VectorXd center = grid.node_point(grid.multi_index(flat));
    Eigen::MatrixXd avg(dim, dim);
    std::size_t count = 0;

    if (dim == 2) {
      double acc[3] = {0.0, 0.0, 0.0};
      count = kernels::boxed_outer_accumulate_2d(
          traj.points.col(0).data(), traj.points.col(1).data(),
          vel.velocities.col(0).data(), vel.velocities.col(1).data(),
          static_cast<std::size_t>(n_samples), center[0], center[1], radius[0],
          radius[1], acc);
      if (count > 0) {
        avg(0, 0) = acc[0] / count;
        avg(0, 1) = avg(1, 0) = acc[1] / count;
        avg(1, 1) = acc[2] / count;
      }
    } else {
      avg.setZero();
      for (Eigen::Index i = 0; i < n_samples; ++i) {
        bool inside = true;
        for (Eigen::Index a = 0; a < dim; ++a)
          if (std::abs(traj.points(i, a) - center[a]) > radius[a]) {
            inside = false;
            break;
          }
        if (!inside) continue;
        avg.noalias() +=
            vel.velocities.row(i).transpose() * vel.velocities.row(i);
        ++count;
      }
      if (count > 0) avg /= static_cast<double>(count);
    }

    if (count < static_cast<std::size_t>(min_samples)) continue;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(avg);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0) || lmax / lmin > opts.cond_max) continue;

    // Scale-invariant ridge, then invert the contravariant average.
    Eigen::MatrixXd ridged =
        avg + opts.ridge_epsilon * (avg.trace() / dim) *
                  Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd g_cov = ridged.inverse();
    samples[static_cast<std::size_t>(flat)] =
        0.5 * (g_cov + g_cov.transpose());
    valid[static_cast<std::size_t>(flat)] = 1;
    any_valid = true;
  }

  if (!any_valid)
    throw Error::numerical("NoValidNodes",
                           "no grid node had enough well-conditioned samples");
  return MetricField::from_samples(grid, std::move(samples), std::move(valid));
}

}  // namespace geoscale
