#include "hopf/degree.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "hopf/connection.hpp"
#include "hopf/error.hpp"
#include "hopf/mesh.hpp"
#include "hopf/parallel.hpp"

namespace hopf::degree {

using surfaces::GaussPoint;

double DegreeEstimate::rounding_gap() const { return std::abs(value - rounded); }

bool DegreeEstimate::consistent(double tolerance) const { return rounding_gap() <= std::max(error, tolerance); }

DegreeEstimate quadrature_estimate(std::string name, const Hypersurface& h, std::span<const int> resolution,
                                   const std::function<double(const surfaces::QuadratureNode&)>& integrand) {
  std::vector<int> res(resolution.begin(), resolution.end());
  if (res.empty()) res = surfaces::default_resolution(h);
  std::vector<int> half;
  for (int r : res) half.push_back(std::max(8, r / 2));
  const auto rule = surfaces::quadrature(h, res);
  const auto coarse = surfaces::quadrature(h, half);
  DegreeEstimate e;
  e.estimator = std::move(name);
  e.value = surfaces::integrate_nodes(rule, integrand);
  const double coarse_value = surfaces::integrate_nodes(coarse, integrand);
  e.error = std::abs(e.value - coarse_value);
  e.rounded = static_cast<int>(std::lround(e.value));
  e.diagnostics.nodes = static_cast<long long>(rule.nodes.size() + coarse.nodes.size());
  e.diagnostics.resolution = res;
  return e;
}

Vec random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
  } while (v.norm() < 1e-6);
  return v / v.norm();
}

double sphere_volume(int n) {
  switch (n) {
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    case 4: return 2.0 * std::numbers::pi * std::numbers::pi;
    default: break;
  }
  throw InputError("sphere_volume: ambient dimension must be 2, 3 or 4");
}

// ---------------------------------------------------------------------------
// Preimages

namespace {

constexpr double kRootTolerance = 1e-12;
constexpr double kMergeRadius = 1e-6;
constexpr double kRegularity = 1e-6;
constexpr int kNewtonIterations = 50;
// A seed whose Newton run ends above this residual sat in the basin of a
// non-root local minimum and is dropped; below it the run counts as a stall.
constexpr double kNonRootResidual = 1e-3;

// Seeding resolves every root only if adjacent grid normals turn by less
// than this; coarser grids can merge neighbouring roots of opposite sign.
constexpr double kMaxSeedTurn = 30.0 * std::numbers::pi / 180.0;
constexpr std::size_t kMaxGridNodes = std::size_t{1} << 22;

enum class Outcome { converged, not_a_root, stalled };

struct Grid {
  int count = 0;
  std::vector<int> dims;
  std::vector<Vec> normals;  // NaN-free entries only where valid[i]
  std::vector<char> valid;
  std::vector<std::vector<int>> neighbours;  // mesh seeding only
  std::vector<Vec> points;                   // mesh seeding only
};

}  // namespace

struct PreimageFinder::Impl {
  Hypersurface h;
  int base_grid = 64;
  Grid coarse;
  mutable std::once_flag fine_once;
  mutable Grid fine;

  Grid build(int count) const;
  double max_turn(const Grid& g) const;
  Grid build_chart(int count) const;
  Grid build_implicit(int count) const;
  PreimageSearch search(const Grid& g, const Vec& v, int& collisions) const;

  Param grid_param(const Grid& g, std::size_t flat) const;
  Outcome newton_chart(Param& u, const Vec& v, const Mat& b, double cell) const;
  Outcome newton_implicit(Vec& x, const Vec& v, const Mat& b) const;
};

Grid PreimageFinder::Impl::build(int count) const {
  return h.representation == surfaces::Representation::chart ? build_chart(count) : build_implicit(count);
}

double PreimageFinder::Impl::max_turn(const Grid& g) const {
  auto angle = [&](std::size_t i, std::size_t j) {
    if (!g.valid[i] || !g.valid[j]) return 0.0;
    return std::acos(std::clamp(g.normals[i].dot(g.normals[j]), -1.0, 1.0));
  };
  double worst = 0.0;
  if (!g.neighbours.empty()) {
    for (std::size_t i = 0; i < g.neighbours.size(); ++i) {
      for (int j : g.neighbours[i]) worst = std::max(worst, angle(i, j));
    }
    return worst;
  }
  const auto& dom = h.chart->domain();
  const std::size_t total = g.normals.size();
  std::size_t stride = 1;
  for (int a = dom.dim - 1; a >= 0; --a) {
    const std::size_t len = g.dims[a];
    for (std::size_t i = 0; i < total; ++i) {
      const std::size_t k = (i / stride) % len;
      if (k + 1 < len) {
        worst = std::max(worst, angle(i, i + stride));
      } else if (dom.periodic[a]) {
        worst = std::max(worst, angle(i, i - k * stride));
      }
    }
    stride *= len;
  }
  return worst;
}

Param PreimageFinder::Impl::grid_param(const Grid& g, std::size_t flat) const {
  const auto& dom = h.chart->domain();
  Param u{};
  for (int a = dom.dim - 1; a >= 0; --a) {
    const std::size_t k = flat % g.dims[a];
    flat /= g.dims[a];
    const double step = dom.extent(a) / g.dims[a];
    u[a] = dom.lo[a] + (static_cast<double>(k) + (dom.periodic[a] ? 0.0 : 0.5)) * step;
  }
  return u;
}

Grid PreimageFinder::Impl::build_chart(int count) const {
  const auto& dom = h.chart->domain();
  Grid g;
  g.count = count;
  g.dims.assign(dom.dim, count);
  std::size_t total = 1;
  for (int d : g.dims) total *= d;
  g.normals.assign(total, Vec());
  g.valid.assign(total, 0);
  parallel::for_each_index(total, [&](std::size_t i) {
    try {
      g.normals[i] = surfaces::gauss_map(h, grid_param(g, i)).normal;
      g.valid[i] = 1;
    } catch (const DegeneratePointError&) {
    }
  });
  return g;
}

Grid PreimageFinder::Impl::build_implicit(int count) const {
  const auto& level = h.require_level_set();
  const surfaces::TriMesh mesh = surfaces::marching_tetrahedra(level, count);
  Grid g;
  g.count = count;
  const std::size_t nv = mesh.vertices.size();
  g.points.resize(nv);
  g.normals.assign(nv, Vec());
  g.valid.assign(nv, 0);
  parallel::for_each_index(nv, [&](std::size_t i) {
    g.points[i] = Vec(mesh.vertices[i]);
    const Vec grad = level.gradient(g.points[i]);
    if (grad.norm() > 1e-12) {
      g.normals[i] = grad / grad.norm();
      g.valid[i] = 1;
    }
  });
  g.neighbours.assign(nv, {});
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      g.neighbours[f[k]].push_back(f[(k + 1) % 3]);
      g.neighbours[f[k]].push_back(f[(k + 2) % 3]);
    }
  }
  for (auto& nb : g.neighbours) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

Outcome PreimageFinder::Impl::newton_chart(Param& u, const Vec& v, const Mat& b, double cell) const {
  const auto& chart = *h.chart;
  double residual = 0.0;
  for (int it = 0; it <= kNewtonIterations; ++it) {
    GaussPoint p;
    try {
      p = surfaces::gauss_map(h, u);
    } catch (const DegeneratePointError&) {
      return Outcome::not_a_root;
    }
    const Vec r = b.transpose() * p.normal;
    residual = r.norm();
    if (residual <= kRootTolerance) return p.normal.dot(v) > 0.0 ? Outcome::converged : Outcome::not_a_root;
    if (it == kNewtonIterations) break;
    const Mat jac = b.transpose() * p.normal_derivative;
    const Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) break;
    Vec du = -lu.solve(r);
    const double limit = 2.0 * cell;
    const double biggest = du.cwiseAbs().maxCoeff();
    if (biggest > limit) du *= limit / biggest;
    for (int a = 0; a < p.m; ++a) u[a] += du[a];
    u = chart.wrap(u);
    if (!chart.contains(u)) return Outcome::not_a_root;
  }
  return residual > kNonRootResidual ? Outcome::not_a_root : Outcome::stalled;
}

Outcome PreimageFinder::Impl::newton_implicit(Vec& x, const Vec& v, const Mat& b) const {
  const auto& level = h.require_level_set();
  const int n = level.ambient_dim();
  double residual = 0.0;
  for (int it = 0; it <= kNewtonIterations; ++it) {
    const auto d = level.derivatives(x);
    const double gnorm = d.gradient.norm();
    if (gnorm < 1e-12) return Outcome::not_a_root;
    Vec r(n);
    r[0] = d.value / gnorm;
    r.tail(n - 1) = b.transpose() * d.gradient / gnorm;
    residual = r.norm();
    if (residual <= kRootTolerance) return d.gradient.dot(v) > 0.0 ? Outcome::converged : Outcome::not_a_root;
    if (it == kNewtonIterations) break;
    Mat jac(n, n);
    jac.row(0) = d.gradient.transpose();
    jac.bottomRows(n - 1) = b.transpose() * d.hessian;
    Vec rhs(n);
    rhs[0] = d.value;
    rhs.tail(n - 1) = b.transpose() * d.gradient;
    const Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) break;
    Vec dx = -lu.solve(rhs);
    const double limit = 0.05 * (level.box_hi() - level.box_lo()).maxCoeff();
    if (dx.norm() > limit) dx *= limit / dx.norm();
    x += dx;
  }
  return residual > kNonRootResidual ? Outcome::not_a_root : Outcome::stalled;
}

PreimageSearch PreimageFinder::Impl::search(const Grid& g, const Vec& v, int& collisions) const {
  const bool chart_mode = h.representation == surfaces::Representation::chart;
  const std::size_t total = g.normals.size();
  std::vector<double> dot(total, -2.0);
  for (std::size_t i = 0; i < total; ++i) {
    if (g.valid[i]) dot[i] = g.normals[i].dot(v);
  }

  // Seeds: local maxima of <nu, v> (ties broken towards the lower index).
  std::vector<std::size_t> seeds;
  if (chart_mode) {
    const auto& dom = h.chart->domain();
    const int dim = dom.dim;
    std::vector<int> idx(dim);
    for (std::size_t i = 0; i < total; ++i) {
      if (!(dot[i] > 0.0)) continue;
      std::size_t rest = i;
      for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rest % g.dims[a]);
        rest /= g.dims[a];
      }
      bool is_max = true;
      int offsets = 1;
      for (int a = 0; a < dim; ++a) offsets *= 3;
      for (int o = 0; o < offsets && is_max; ++o) {
        int code = o;
        std::size_t flat = 0;
        bool inside = true;
        bool self = true;
        for (int a = 0; a < dim; ++a) {
          const int delta = code % 3 - 1;
          code /= 3;
          if (delta != 0) self = false;
          int k = idx[a] + delta;
          if (dom.periodic[a]) {
            k = (k + g.dims[a]) % g.dims[a];
          } else if (k < 0 || k >= g.dims[a]) {
            inside = false;
          }
          flat = flat * g.dims[a] + static_cast<std::size_t>(std::max(k, 0));
        }
        if (self || !inside) continue;
        if (dot[flat] > dot[i] || (dot[flat] == dot[i] && flat < i)) is_max = false;
      }
      if (is_max) seeds.push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < total; ++i) {
      if (!(dot[i] > 0.0)) continue;
      bool is_max = true;
      for (int j : g.neighbours[i]) {
        const auto fj = static_cast<std::size_t>(j);
        if (dot[fj] > dot[i] || (dot[fj] == dot[i] && fj < i)) is_max = false;
      }
      if (is_max) seeds.push_back(i);
    }
  }

  const Mat b = complement_basis(v);
  double cell = 0.0;
  if (chart_mode) {
    const auto& dom = h.chart->domain();
    for (int a = 0; a < dom.dim; ++a) cell = std::max(cell, dom.extent(a) / g.dims[a]);
  }
  std::vector<Param> roots(seeds.size());
  std::vector<Outcome> outcomes(seeds.size());
  parallel::for_each_index(seeds.size(), [&](std::size_t s) {
    if (chart_mode) {
      Param u = grid_param(g, seeds[s]);
      outcomes[s] = newton_chart(u, v, b, cell);
      roots[s] = u;
    } else {
      Vec x = g.points[seeds[s]];
      outcomes[s] = newton_implicit(x, v, b);
      roots[s] = to_param(x);
    }
  });

  PreimageSearch out;
  out.grid = g.count;
  out.samples = static_cast<long long>(total);
  collisions = 0;
  std::vector<Param> merged;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (outcomes[s] == Outcome::stalled) {
      out.regular = false;
      out.reason = "Newton refinement stalled";
    }
    if (outcomes[s] != Outcome::converged) continue;
    bool duplicate = false;
    for (const Param& r : merged) {
      const double dist = chart_mode ? h.chart->param_distance(r, roots[s])
                                     : (to_vec(r, h.ambient_dim) - to_vec(roots[s], h.ambient_dim)).norm();
      if (dist <= kMergeRadius) duplicate = true;
    }
    if (duplicate) {
      ++collisions;
      continue;
    }
    merged.push_back(roots[s]);
  }
  for (const Param& r : merged) {
    const GaussPoint p = surfaces::gauss_map(h, r);
    Preimage pre;
    pre.u = r;
    pre.position = p.position;
    pre.jacobian = p.shape.determinant();
    pre.sign = pre.jacobian > 0.0 ? 1 : -1;
    if (std::abs(pre.jacobian) < kRegularity) {
      out.regular = false;
      out.reason = "preimage with |det dG| < 1e-6";
    }
    out.points.push_back(pre);
  }
  return out;
}

PreimageFinder::PreimageFinder(const Hypersurface& h, int grid) : impl_(std::make_unique<Impl>()) {
  if (h.representation == surfaces::Representation::mesh) {
    throw InputError("preimage search needs a chart or implicit shape; '" + h.name + "' is a mesh");
  }
  if (grid < 4) throw InputError("preimage grid must have at least 4 samples per axis");
  impl_->h = h;
  impl_->coarse = impl_->build(grid);
  while (impl_->max_turn(impl_->coarse) > kMaxSeedTurn) {
    const int refined = grid * 3 / 2;
    std::size_t next = 1;
    for (std::size_t k = 0; k < impl_->coarse.dims.size(); ++k) next *= static_cast<std::size_t>(refined);
    if (impl_->coarse.dims.empty()) next = 4 * impl_->coarse.normals.size();
    if (next > kMaxGridNodes) break;
    grid = refined;
    impl_->coarse = impl_->build(grid);
  }
  impl_->base_grid = grid;
}

PreimageFinder::~PreimageFinder() = default;
PreimageFinder::PreimageFinder(PreimageFinder&&) noexcept = default;

PreimageSearch PreimageFinder::find(const Vec& v) const {
  int collisions = 0;
  PreimageSearch s = impl_->search(impl_->coarse, v, collisions);
  if (collisions == 0) return s;
  std::call_once(impl_->fine_once, [&] { impl_->fine = impl_->build(2 * impl_->base_grid); });
  return impl_->search(impl_->fine, v, collisions);
}

PreimageSearch find_preimages(const Hypersurface& h, const Vec& v, int grid) {
  return PreimageFinder(h, grid).find(v);
}

DegreeEstimate degree_preimage(const PreimageFinder& finder, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DegreeEstimate e;
  e.estimator = "preimage";
  for (int draw = 0; draw < 16; ++draw) {
    const Vec v = random_direction(n, rng);
    const PreimageSearch s = finder.find(v);
    ++e.diagnostics.draws;
    e.diagnostics.nodes += s.samples;
    if (!s.regular) {
      ++e.diagnostics.rejected_draws;
      e.diagnostics.notes.push_back("draw " + std::to_string(draw) + " rejected: " + s.reason);
      continue;
    }
    int total = 0;
    for (const auto& p : s.points) total += p.sign;
    e.value = total;
    e.rounded = total;
    e.error = 0.0;
    e.diagnostics.preimages = static_cast<int>(s.points.size());
    e.diagnostics.resolution = {s.grid};
    return e;
  }
  throw NonRegularValueError("no regular value found in 16 direction draws (seed " + std::to_string(seed) + ")");
}

DegreeEstimate degree_preimage(const Hypersurface& h, std::uint64_t seed, int grid) {
  return degree_preimage(PreimageFinder(h, grid), h.ambient_dim, seed);
}

// ---------------------------------------------------------------------------
// Quadrature estimators

DegreeEstimate degree_gk(const Hypersurface& h, std::span<const int> resolution) {
  const double vol = sphere_volume(h.ambient_dim);
  DegreeEstimate e = quadrature_estimate("gk", h, resolution, [&](const surfaces::QuadratureNode& node) {
    const GaussPoint p = surfaces::gauss_map(h, node.u);
    return surfaces::shape_operator(p).determinant() * p.volume_element;
  });
  e.value /= vol;
  e.error /= vol;
  e.rounded = static_cast<int>(std::lround(e.value));
  return e;
}

DegreeEstimate degree_pfaffian(const Hypersurface& h, std::span<const int> resolution) {
  if (h.ambient_dim % 2 == 0) {
    throw UnsupportedParityError("degree_pfaffian needs odd n (even-dimensional H); got n = " +
                                 std::to_string(h.ambient_dim));
  }
  h.require_chart();
  DegreeEstimate e = quadrature_estimate("pfaffian", h, resolution, [&](const surfaces::QuadratureNode& node) {
    return connection::curvature(h, node.u).euler.top_coefficient()[0];
  });
  e.value *= 0.5;
  e.error *= 0.5;
  e.rounded = static_cast<int>(std::lround(e.value));
  return e;
}

DegreeEstimate winding_number(const Hypersurface& h, int resolution) {
  if (h.ambient_dim != 2) throw InputError("winding_number needs a curve in R^2");
  const auto& chart = h.require_chart();
  const auto& dom = chart.domain();
  if (!dom.periodic[0]) throw InputError("winding_number needs a periodic parametrization");
  if (resolution < 8) throw InputError("winding_number resolution must be >= 8");
  DegreeEstimate e;
  e.estimator = "winding";
  int count = resolution;
  for (int attempt = 0; attempt <= 4; ++attempt, count *= 2) {
    std::vector<Vec> normals(count);
    parallel::for_each_index(count, [&](std::size_t k) {
      Param u{};
      u[0] = dom.lo[0] + dom.extent(0) * static_cast<double>(k) / count;
      normals[k] = surfaces::gauss_map(h, u).normal;
    });
    std::vector<double> steps(count);
    bool resolved = true;
    for (int k = 0; k < count; ++k) {
      const Vec& a = normals[k];
      const Vec& b = normals[(k + 1) % count];
      if (a.dot(b) <= 0.0) resolved = false;
      steps[k] = std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b));
    }
    e.diagnostics.nodes += count;
    if (!resolved) {
      e.diagnostics.notes.push_back("normal turned >= 90 degrees between samples at " + std::to_string(count));
      continue;
    }
    e.value = parallel::pairwise_sum(steps) / (2.0 * std::numbers::pi);
    e.rounded = static_cast<int>(std::lround(e.value));
    e.error = std::abs(e.value - e.rounded);
    e.diagnostics.resolution = {count};
    return e;
  }
  throw ResolutionError("winding_number: normal angle under-resolved after 4 doublings");
}

DegreeEstimate degree_mesh(const surfaces::TriMesh& m) {
  std::vector<double> defects = m.angle_defects;
  if (static_cast<int>(defects.size()) != m.vertex_count()) {
    defects.resize(m.vertices.size());
    for (int v = 0; v < m.vertex_count(); ++v) defects[v] = surfaces::angle_defect(m, v);
  }
  DegreeEstimate e;
  e.estimator = "mesh";
  e.value = parallel::pairwise_sum(defects) / (4.0 * std::numbers::pi);
  e.rounded = static_cast<int>(std::lround(e.value));
  e.error = std::abs(e.value - std::round(2.0 * e.value) / 2.0);
  e.diagnostics.nodes = m.vertex_count();
  return e;
}

}  // namespace hopf::degree
