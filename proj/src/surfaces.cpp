#include "hopf/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hopf/error.hpp"
#include "hopf/mesh.hpp"
#include "hopf/parallel.hpp"

namespace hopf {

Vec cofactor_normal(const Mat& cols) {
  const int n = static_cast<int>(cols.rows());
  Vec out(n);
  Mat m(n, n);
  m.rightCols(n - 1) = cols;
  for (int j = 0; j < n; ++j) {
    m.col(0).setZero();
    m(j, 0) = 1.0;
    out[j] = m.determinant();
  }
  return out;
}

Mat complement_basis(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Mat a(n, 1);
  a.col(0) = v;
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat basis = q.rightCols(n - 1);
  Mat full(n, n);
  full.col(0) = v;
  full.rightCols(n - 1) = basis;
  if (full.determinant() < 0.0) basis.col(n - 2) *= -1.0;
  return basis;
}

Mat gram_schmidt(const Mat& cols, Mat* coeffs) {
  const int n = static_cast<int>(cols.rows());
  const int m = static_cast<int>(cols.cols());
  Mat q(n, m);
  Mat e = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    Vec v = cols.col(j);
    Vec ej = Vec::Zero(m);
    ej[j] = 1.0;
    for (int k = 0; k < j; ++k) {
      const double r = q.col(k).dot(v);
      v -= r * q.col(k);
      ej -= r * e.col(k);
    }
    const double norm = v.norm();
    if (norm < 1e-14) throw DegeneratePointError("Gram-Schmidt on linearly dependent vectors");
    q.col(j) = v / norm;
    e.col(j) = ej / norm;
  }
  if (coeffs) *coeffs = e;
  return q;
}

}  // namespace hopf

namespace hopf::surfaces {

namespace {

std::array<double, 3> head3(const Param& u) { return {u[0], u[1], u[2]}; }

}  // namespace

// ---------------------------------------------------------------------------
// DiffBackend

DiffBackend DiffBackend::parse(std::string_view name) {
  DiffBackend b;
  if (name == "analytic") {
    b.kind = Kind::analytic;
  } else if (name == "dual") {
    b.kind = Kind::dual;
  } else if (name == "fd" || name == "finite_difference") {
    b.kind = Kind::finite_difference;
  } else {
    throw InputError("unknown differentiation backend '" + std::string(name) + "'");
  }
  return b;
}

std::string DiffBackend::name() const {
  switch (kind) {
    case Kind::analytic: return "analytic";
    case Kind::dual: return "dual";
    case Kind::finite_difference: return "fd";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Chart

Vec Chart::position(const Param& u) const {
  const auto p = map_(head3(u));
  Vec v(n_);
  for (int i = 0; i < n_; ++i) v[i] = p[i];
  return v;
}

Jet Chart::jet(const Param& u, const DiffBackend& backend) const {
  switch (backend.kind) {
    case DiffBackend::Kind::analytic:
      return analytic_ ? analytic_jet(u) : dual_jet(u);
    case DiffBackend::Kind::dual:
      return dual_jet(u);
    case DiffBackend::Kind::finite_difference:
      return fd_jet(u, backend.h1, backend.h2);
  }
  return dual_jet(u);
}

Jet Chart::analytic_jet(const Param& u) const { return analytic_(u); }

Jet Chart::dual_jet(const Param& u) const {
  const int m = param_dim();
  Jet j;
  j.n = n_;
  j.m = m;
  j.position = Vec(n_);
  j.first = Mat(n_, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      std::array<Dual2, 3> x{};
      for (int k = 0; k < m; ++k) {
        x[k] = Dual2(Dual1(u[k], k == a ? 1.0 : 0.0), Dual1(k == b ? 1.0 : 0.0, 0.0));
      }
      const auto p = dual_map_(x);
      Vec second(n_);
      for (int c = 0; c < n_; ++c) {
        second[c] = p[c].d.d;
        if (a == b) {
          j.position[c] = p[c].v.v;
          j.first(c, a) = p[c].v.d;
        }
      }
      j.second[a][b] = second;
      j.second[b][a] = second;
    }
  }
  return j;
}

Chart::Third Chart::third_derivatives(const Param& u) const {
  const int m = param_dim();
  Third out;
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      for (int c = b; c < m; ++c) {
        std::array<Dual3, 3> x{};
        for (int k = 0; k < m; ++k) {
          const Dual2 inner(Dual1(u[k], k == a ? 1.0 : 0.0), Dual1(k == b ? 1.0 : 0.0, 0.0));
          const Dual2 outer(Dual1(k == c ? 1.0 : 0.0, 0.0), Dual1(0.0, 0.0));
          x[k] = Dual3(inner, outer);
        }
        const auto p = dual3_map_(x);
        Vec d(n_);
        for (int i = 0; i < n_; ++i) d[i] = p[i].d.d.d;
        const int idx[3] = {a, b, c};
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& pm : perms) out[idx[pm[0]]][idx[pm[1]]][idx[pm[2]]] = d;
      }
    }
  }
  return out;
}

Jet Chart::fd_jet(const Param& u, double h1, double h2) const {
  const int m = param_dim();
  Jet j;
  j.n = n_;
  j.m = m;
  j.position = position(u);
  j.first = Mat(n_, m);
  auto shifted = [&](int a, double da, int b, double db) {
    Param v = u;
    v[a] += da;
    v[b] += db;
    return position(v);
  };
  for (int a = 0; a < m; ++a) {
    j.first.col(a) = (shifted(a, h1, a, 0.0) - shifted(a, -h1, a, 0.0)) / (2.0 * h1);
  }
  for (int a = 0; a < m; ++a) {
    j.second[a][a] = (shifted(a, h2, a, 0.0) - 2.0 * j.position + shifted(a, -h2, a, 0.0)) / (h2 * h2);
    for (int b = a + 1; b < m; ++b) {
      Vec d = (shifted(a, h2, b, h2) - shifted(a, h2, b, -h2) - shifted(a, -h2, b, h2) + shifted(a, -h2, b, -h2)) /
              (4.0 * h2 * h2);
      j.second[a][b] = d;
      j.second[b][a] = d;
    }
  }
  return j;
}

Param Chart::wrap(Param u) const {
  for (int a = 0; a < domain_.dim; ++a) {
    if (!domain_.periodic[a]) continue;
    const double len = domain_.extent(a);
    double x = std::fmod(u[a] - domain_.lo[a], len);
    if (x < 0.0) x += len;
    u[a] = domain_.lo[a] + x;
  }
  return u;
}

double Chart::param_distance(const Param& a, const Param& b) const {
  double d = 0.0;
  for (int k = 0; k < domain_.dim; ++k) {
    double diff = std::abs(a[k] - b[k]);
    if (domain_.periodic[k]) {
      const double len = domain_.extent(k);
      diff = std::fmod(diff, len);
      diff = std::min(diff, len - diff);
    }
    d = std::max(d, diff);
  }
  return d;
}

bool Chart::contains(const Param& u) const {
  for (int a = 0; a < domain_.dim; ++a) {
    if (domain_.periodic[a]) continue;
    if (!(u[a] > domain_.lo[a] && u[a] < domain_.hi[a])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// ImplicitSurface

namespace {

template <class T>
Point<T> lift(const Vec& x) {
  Point<T> p{};
  for (int i = 0; i < x.size(); ++i) p[i] = T(x[i]);
  return p;
}

}  // namespace

double ImplicitSurface::value(const Vec& x) const { return f_(lift<double>(x)); }

Vec ImplicitSurface::gradient(const Vec& x) const {
  Vec g(n_);
  for (int i = 0; i < n_; ++i) {
    Point<Dual1> p{};
    for (int k = 0; k < n_; ++k) p[k] = Dual1(x[k], k == i ? 1.0 : 0.0);
    g[i] = f1_(p).d;
  }
  return g;
}

ImplicitSurface::Derivatives ImplicitSurface::derivatives(const Vec& x) const {
  Derivatives d;
  d.gradient = Vec(n_);
  d.hessian = Mat(n_, n_);
  for (int a = 0; a < n_; ++a) {
    for (int b = a; b < n_; ++b) {
      Point<Dual2> p{};
      for (int k = 0; k < n_; ++k) {
        p[k] = Dual2(Dual1(x[k], k == a ? 1.0 : 0.0), Dual1(k == b ? 1.0 : 0.0, 0.0));
      }
      const Dual2 r = f2_(p);
      if (a == b) {
        d.value = r.v.v;
        d.gradient[a] = r.v.d;
      }
      d.hessian(a, b) = r.d.d;
      d.hessian(b, a) = r.d.d;
    }
  }
  return d;
}

Vec ImplicitSurface::project(const Vec& x, int max_iterations) const {
  Vec y = x;
  for (int it = 0; it < max_iterations; ++it) {
    const double f = value(y);
    const Vec g = gradient(y);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-16) throw DegeneratePointError("vanishing gradient while projecting onto level set");
    const Vec step = (f / g2) * g;
    y -= step;
    if (step.norm() < 1e-15 * (1.0 + y.norm())) break;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Hypersurface

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::chart: return "chart";
    case Representation::implicit: return "implicit";
    case Representation::mesh: return "mesh";
  }
  return "?";
}

const Chart& Hypersurface::require_chart() const {
  if (!chart) throw InputError("shape '" + name + "' has no parametrized chart");
  return *chart;
}

const ImplicitSurface& Hypersurface::require_level_set() const {
  if (!level_set) throw InputError("shape '" + name + "' has no level-set realization");
  return *level_set;
}

// ---------------------------------------------------------------------------
// Gauss map

GaussPoint gauss_point_from_jet(const Jet& jet, const Param& u) {
  GaussPoint p;
  p.u = u;
  p.n = jet.n;
  p.m = jet.m;
  p.position = jet.position;
  p.basis = jet.first;
  const Eigen::JacobiSVD<Mat> svd(p.basis);
  if (svd.singularValues()(p.m - 1) <= 1e-8) {
    throw DegeneratePointError("chart is not an immersion at this parameter (rank-deficient Jacobian)");
  }
  const Vec raw = cofactor_normal(p.basis);
  p.normal = raw / raw.norm();
  p.metric = p.basis.transpose() * p.basis;
  p.second_form = Mat(p.m, p.m);
  for (int i = 0; i < p.m; ++i) {
    for (int j = 0; j < p.m; ++j) p.second_form(i, j) = -jet.second[i][j].dot(p.normal);
  }
  const double det_g = p.metric.determinant();
  if (!(det_g > 1e-24)) throw DegeneratePointError("singular metric");
  p.volume_element = std::sqrt(det_g);
  p.shape = p.metric.ldlt().solve(p.second_form);
  p.normal_derivative = p.basis * p.shape;
  p.frame = gram_schmidt(p.basis);
  return p;
}

GaussPoint implicit_gauss_point(const ImplicitSurface& s, const Vec& x) {
  const auto d = s.derivatives(x);
  const double gnorm = d.gradient.norm();
  if (gnorm <= 1e-8) throw DegeneratePointError("0 is not a regular value here: |grad F| <= 1e-8");
  GaussPoint p;
  p.n = s.ambient_dim();
  p.m = p.n - 1;
  p.u = to_param(x);
  p.position = x;
  p.normal = d.gradient / gnorm;
  p.frame = complement_basis(p.normal);
  p.basis = p.frame;
  p.metric = Mat::Identity(p.m, p.m);
  p.shape = p.frame.transpose() * d.hessian * p.frame / gnorm;
  p.second_form = p.shape;
  p.normal_derivative = p.frame * p.shape;
  p.volume_element = 1.0;
  return p;
}

GaussPoint gauss_map(const Hypersurface& h, const Param& u) {
  switch (h.representation) {
    case Representation::chart: {
      const auto& c = h.require_chart();
      return gauss_point_from_jet(c.jet(u, h.backend), u);
    }
    case Representation::implicit:
      return implicit_gauss_point(h.require_level_set(), to_vec(u, h.ambient_dim));
    case Representation::mesh:
      break;
  }
  throw InputError("gauss_map: shape '" + h.name + "' is a mesh; use the discrete estimators");
}

Mat shape_operator(const GaussPoint& p) {
  if (!(std::abs(p.metric.determinant()) > 1e-24)) throw DegeneratePointError("singular metric");
  return p.shape;
}

Vec normal_derivative_cofactor(const Jet& jet, int i) {
  const Vec raw = cofactor_normal(jet.first);
  const double norm = raw.norm();
  Vec draw = Vec::Zero(jet.n);
  for (int k = 0; k < jet.m; ++k) {
    Mat cols = jet.first;
    cols.col(k) = jet.second[i][k];
    draw += cofactor_normal(cols);
  }
  const Vec nu = raw / norm;
  return (draw - nu * nu.dot(draw)) / norm;
}

// ---------------------------------------------------------------------------
// Quadrature

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= count; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = count * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[count - 1 - i] = weights[i];
  }
}

namespace {

QuadratureRule chart_rule(const Chart& c, std::span<const int> resolution) {
  const auto& dom = c.domain();
  if (static_cast<int>(resolution.size()) != dom.dim) {
    throw InputError("resolution needs " + std::to_string(dom.dim) + " axis counts");
  }
  std::vector<std::vector<double>> axis_nodes(dom.dim);
  std::vector<std::vector<double>> axis_weights(dom.dim);
  for (int a = 0; a < dom.dim; ++a) {
    const int count = resolution[a];
    if (count < 8) throw InputError("quadrature resolution must be >= 8 per axis");
    if (dom.periodic[a]) {
      const double step = dom.extent(a) / count;
      for (int k = 0; k < count; ++k) {
        axis_nodes[a].push_back(dom.lo[a] + k * step);
        axis_weights[a].push_back(step);
      }
    } else {
      std::vector<double> x;
      std::vector<double> w;
      gauss_legendre(count, x, w);
      const double mid = 0.5 * (dom.lo[a] + dom.hi[a]);
      const double half = 0.5 * dom.extent(a);
      for (int k = 0; k < count; ++k) {
        axis_nodes[a].push_back(mid + half * x[k]);
        axis_weights[a].push_back(half * w[k]);
      }
    }
  }
  QuadratureRule rule;
  rule.resolution.assign(resolution.begin(), resolution.end());
  std::size_t total = 1;
  for (int a = 0; a < dom.dim; ++a) total *= resolution[a];
  rule.nodes.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    QuadratureNode node;
    node.weight = 1.0;
    std::size_t rest = flat;
    for (int a = dom.dim - 1; a >= 0; --a) {
      const std::size_t k = rest % resolution[a];
      rest /= resolution[a];
      node.u[a] = axis_nodes[a][k];
      node.weight *= axis_weights[a][k];
    }
    rule.nodes.push_back(node);
  }
  return rule;
}

QuadratureRule implicit_rule(const ImplicitSurface& s, int cells) {
  if (s.ambient_dim() != 3) throw InputError("implicit quadrature is implemented for surfaces in R^3");
  if (cells < 8) throw InputError("quadrature resolution must be >= 8 cells");
  const TriMesh mesh = marching_tetrahedra(s, cells);
  std::vector<Eigen::Vector3d> projected(mesh.vertices.size());
  parallel::for_each_index(mesh.vertices.size(), [&](std::size_t i) {
    projected[i] = s.project(Vec(mesh.vertices[i])).head<3>();
  });
  QuadratureRule rule;
  rule.resolution = {cells};
  std::vector<std::array<QuadratureNode, 3>> per_face(mesh.faces.size());
  static constexpr double kBary[3][3] = {
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
  parallel::for_each_index(mesh.faces.size(), [&](std::size_t f) {
    const auto& face = mesh.faces[f];
    const Eigen::Vector3d& a = projected[face[0]];
    const Eigen::Vector3d& b = projected[face[1]];
    const Eigen::Vector3d& c = projected[face[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    for (int q = 0; q < 3; ++q) {
      const Eigen::Vector3d x = kBary[q][0] * a + kBary[q][1] * b + kBary[q][2] * c;
      const Vec y = s.project(Vec(x));
      per_face[f][q].u = to_param(y);
      per_face[f][q].weight = area / 3.0;
    }
  });
  rule.nodes.reserve(3 * per_face.size());
  for (const auto& nodes : per_face) rule.nodes.insert(rule.nodes.end(), nodes.begin(), nodes.end());
  return rule;
}

}  // namespace

QuadratureRule quadrature(const Hypersurface& h, std::span<const int> resolution) {
  switch (h.representation) {
    case Representation::chart:
      return chart_rule(h.require_chart(), resolution);
    case Representation::implicit:
      return implicit_rule(h.require_level_set(), resolution.empty() ? h.implicit_mesh_cells : resolution[0]);
    case Representation::mesh:
      break;
  }
  throw InputError("quadrature: shape '" + h.name + "' is a mesh");
}

std::vector<int> default_resolution(const Hypersurface& h) {
  if (!h.default_grid.empty()) return h.default_grid;
  if (h.representation == Representation::implicit) return {h.implicit_mesh_cells};
  if (h.representation == Representation::mesh) return {};
  const auto& dom = h.require_chart().domain();
  switch (dom.dim) {
    case 1: return {256};
    case 2: return {64, 128};
    default: return {24, 48, 48};
  }
}

double integrate_nodes(const QuadratureRule& rule,
                       const std::function<double(const QuadratureNode&)>& fn) {
  return parallel::map_reduce(rule.nodes.size(), [&](std::size_t i) {
    return rule.nodes[i].weight * fn(rule.nodes[i]);
  });
}

double integrate_function(const Hypersurface& h, const QuadratureRule& rule,
                          const std::function<double(const GaussPoint&)>& f) {
  return integrate_nodes(rule, [&](const QuadratureNode& node) {
    const GaussPoint p = gauss_map(h, node.u);
    return f(p) * p.volume_element;
  });
}

}  // namespace hopf::surfaces
