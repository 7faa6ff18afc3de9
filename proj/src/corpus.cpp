#include "hopf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hopf/error.hpp"
#include "hopf/mesh.hpp"
#include "json.hpp"

namespace hopf::corpus {

using surfaces::Chart;
using surfaces::Domain;
using surfaces::Hypersurface;
using surfaces::ImplicitSurface;
using surfaces::Jet;
using surfaces::Representation;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Jet empty_jet(int n, int m) {
  Jet j;
  j.n = n;
  j.m = m;
  j.position = Vec(n);
  j.first = Mat(n, m);
  return j;
}

void set_second(Jet& j, int a, int b, const Vec& v) {
  j.second[a][b] = v;
  j.second[b][a] = v;
}

Domain periodic_1d() {
  Domain d;
  d.dim = 1;
  d.hi[0] = 2.0 * kPi;
  d.periodic[0] = true;
  return d;
}

// ---------------------------------------------------------------------------
// Curves

Hypersurface ellipse_curve(const std::string& name, double a, double b) {
  auto map = [a, b](const auto& u) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u[0])>;
    return Point<T>{a * cos(u[0]), b * sin(u[0]), T(0.0), T(0.0)};
  };
  auto jet = [a, b](const Param& u) {
    const double c = std::cos(u[0]), s = std::sin(u[0]);
    Jet j = empty_jet(2, 1);
    j.position = vec({a * c, b * s});
    j.first.col(0) = vec({-a * s, b * c});
    j.second[0][0] = vec({-a * c, -b * s});
    return j;
  };
  Hypersurface h;
  h.name = name;
  h.ambient_dim = 2;
  h.chart = Chart::make(2, periodic_1d(), map, jet);
  const double ext = 1.5 * std::max(a, b);
  h.level_set = ImplicitSurface::make(
      2, [a, b](const auto& x) { return (x[0] / a) * (x[0] / a) + (x[1] / b) * (x[1] / b) - 1.0; },
      vec({-ext, -ext}), vec({ext, ext}));
  return h;
}

Hypersurface bumpy_circle(double amp, double k) {
  auto map = [amp, k](const auto& u) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u[0])>;
    const T rho = 1.0 + amp * cos(k * u[0]);
    return Point<T>{rho * cos(u[0]), rho * sin(u[0]), T(0.0), T(0.0)};
  };
  auto jet = [amp, k](const Param& u) {
    const double t = u[0];
    const double c = std::cos(t), s = std::sin(t);
    const double rho = 1.0 + amp * std::cos(k * t);
    const double d1 = -amp * k * std::sin(k * t);
    const double d2 = -amp * k * k * std::cos(k * t);
    const Vec radial = vec({c, s});
    const Vec tangential = vec({-s, c});
    Jet j = empty_jet(2, 1);
    j.position = rho * radial;
    j.first.col(0) = d1 * radial + rho * tangential;
    j.second[0][0] = (d2 - rho) * radial + 2.0 * d1 * tangential;
    return j;
  };
  Hypersurface h;
  h.name = "bumpy_circle";
  h.ambient_dim = 2;
  h.chart = Chart::make(2, periodic_1d(), map, jet);
  h.default_grid = {512};
  h.level_set = ImplicitSurface::make(
      2,
      [amp, k](const auto& x) {
        using std::atan2;
        using std::cos;
        using std::sqrt;
        return sqrt(x[0] * x[0] + x[1] * x[1]) - (1.0 + amp * cos(k * atan2(x[1], x[0])));
      },
      vec({-2.0, -2.0}), vec({2.0, 2.0}));
  return h;
}

// ---------------------------------------------------------------------------
// Surfaces in R^3

Domain polar_domain() {
  Domain d;
  d.dim = 2;
  d.lo = {0.0, 0.0, 0.0};
  d.hi = {kPi, 2.0 * kPi, 0.0};
  d.periodic = {false, true, false};
  return d;
}

// psi = diag(a, b, c) (cos th, sin th cos ph, sin th sin ph); poles on the x axis.
Hypersurface ellipsoid3(const std::string& name, double a, double b, double c) {
  auto map = [a, b, c](const auto& u) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u[0])>;
    return Point<T>{a * cos(u[0]), b * sin(u[0]) * cos(u[1]), c * sin(u[0]) * sin(u[1]), T(0.0)};
  };
  auto jet = [a, b, c](const Param& u) {
    const double ct = std::cos(u[0]), st = std::sin(u[0]);
    const double cp = std::cos(u[1]), sp = std::sin(u[1]);
    const Vec d = vec({a, b, c});
    Jet j = empty_jet(3, 2);
    j.position = d.cwiseProduct(vec({ct, st * cp, st * sp}));
    j.first.col(0) = d.cwiseProduct(vec({-st, ct * cp, ct * sp}));
    j.first.col(1) = d.cwiseProduct(vec({0.0, -st * sp, st * cp}));
    set_second(j, 0, 0, d.cwiseProduct(vec({-ct, -st * cp, -st * sp})));
    set_second(j, 0, 1, d.cwiseProduct(vec({0.0, -ct * sp, ct * cp})));
    set_second(j, 1, 1, d.cwiseProduct(vec({0.0, -st * cp, -st * sp})));
    return j;
  };
  Hypersurface h;
  h.name = name;
  h.ambient_dim = 3;
  h.chart = Chart::make(3, polar_domain(), map, jet);
  const double ext = 1.5 * std::max({a, b, c});
  h.level_set = ImplicitSurface::make(
      3,
      [a, b, c](const auto& x) {
        return (x[0] / a) * (x[0] / a) + (x[1] / b) * (x[1] / b) + (x[2] / c) * (x[2] / c) - 1.0;
      },
      vec({-ext, -ext, -ext}), vec({ext, ext, ext}));
  return h;
}

// u = (phi, theta): ((R + r cos th) cos ph, (R + r cos th) sin ph, r sin th).
Hypersurface torus(double big, double small) {
  auto map = [big, small](const auto& u) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u[0])>;
    const T rho = big + small * cos(u[1]);
    return Point<T>{rho * cos(u[0]), rho * sin(u[0]), small * sin(u[1]), T(0.0)};
  };
  auto jet = [big, small](const Param& u) {
    const double cp = std::cos(u[0]), sp = std::sin(u[0]);
    const double ct = std::cos(u[1]), st = std::sin(u[1]);
    const double rho = big + small * ct;
    Jet j = empty_jet(3, 2);
    j.position = vec({rho * cp, rho * sp, small * st});
    j.first.col(0) = vec({-rho * sp, rho * cp, 0.0});
    j.first.col(1) = vec({-small * st * cp, -small * st * sp, small * ct});
    set_second(j, 0, 0, vec({-rho * cp, -rho * sp, 0.0}));
    set_second(j, 0, 1, vec({small * st * sp, -small * st * cp, 0.0}));
    set_second(j, 1, 1, vec({-small * ct * cp, -small * ct * sp, -small * st}));
    return j;
  };
  Domain d;
  d.dim = 2;
  d.hi = {2.0 * kPi, 2.0 * kPi, 0.0};
  d.periodic = {true, true, false};
  Hypersurface h;
  h.name = "torus";
  h.ambient_dim = 3;
  h.chart = Chart::make(3, d, map, jet);
  h.default_grid = {64, 64};
  const double ext = 1.2 * (big + small);
  h.level_set = ImplicitSurface::make(
      3,
      [big, small](const auto& x) {
        using std::sqrt;
        const auto q = sqrt(x[0] * x[0] + x[1] * x[1]) - big;
        return q * q + x[2] * x[2] - small * small;
      },
      vec({-ext, -ext, -ext}), vec({ext, ext, ext}));
  return h;
}

// Thickened lemniscate of Gerono: g = x^4 - x^2 + y^2, F = g^2 + z^2 - eps^2.
// 0 is a regular value of F since the critical values of g are 0 and -1/4.
Hypersurface genus2(double eps, int cells) {
  Hypersurface h;
  h.name = "genus2";
  h.ambient_dim = 3;
  h.representation = Representation::implicit;
  h.implicit_mesh_cells = cells;
  const double ymax = std::sqrt(0.25 + eps) + 0.1;
  const double xmax = std::sqrt(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * eps))) + 0.1;
  h.level_set = ImplicitSurface::make(
      3,
      [eps](const auto& x) {
        const auto g = x[0] * x[0] * x[0] * x[0] - x[0] * x[0] + x[1] * x[1];
        return g * g + x[2] * x[2] - eps * eps;
      },
      vec({-xmax, -ymax, -(eps + 0.1)}), vec({xmax, ymax, eps + 0.1}));
  return h;
}

// ---------------------------------------------------------------------------
// Hypersurfaces in R^4

// psi = diag(a, b, c, d) (sin eta cos x1, sin eta sin x1, cos eta cos x2, cos eta sin x2).
Hypersurface ellipsoid4(const std::string& name, const Vec& axes) {
  const double a = axes[0], b = axes[1], c = axes[2], dd = axes[3];
  auto map = [a, b, c, dd](const auto& u) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u[0])>;
    return Point<T>{a * sin(u[0]) * cos(u[1]), b * sin(u[0]) * sin(u[1]), c * cos(u[0]) * cos(u[2]),
                    dd * cos(u[0]) * sin(u[2])};
  };
  auto jet = [axes](const Param& u) {
    const double se = std::sin(u[0]), ce = std::cos(u[0]);
    const double c1 = std::cos(u[1]), s1 = std::sin(u[1]);
    const double c2 = std::cos(u[2]), s2 = std::sin(u[2]);
    Jet j = empty_jet(4, 3);
    auto put = [&](std::initializer_list<double> xs) { return Vec(axes.cwiseProduct(vec(xs))); };
    j.position = put({se * c1, se * s1, ce * c2, ce * s2});
    j.first.col(0) = put({ce * c1, ce * s1, -se * c2, -se * s2});
    j.first.col(1) = put({-se * s1, se * c1, 0.0, 0.0});
    j.first.col(2) = put({0.0, 0.0, -ce * s2, ce * c2});
    set_second(j, 0, 0, put({-se * c1, -se * s1, -ce * c2, -ce * s2}));
    set_second(j, 0, 1, put({-ce * s1, ce * c1, 0.0, 0.0}));
    set_second(j, 0, 2, put({0.0, 0.0, se * s2, -se * c2}));
    set_second(j, 1, 1, put({-se * c1, -se * s1, 0.0, 0.0}));
    set_second(j, 1, 2, put({0.0, 0.0, 0.0, 0.0}));
    set_second(j, 2, 2, put({0.0, 0.0, -ce * c2, -ce * s2}));
    return j;
  };
  Domain d;
  d.dim = 3;
  d.hi = {0.5 * kPi, 2.0 * kPi, 2.0 * kPi};
  d.periodic = {false, true, true};
  Hypersurface h;
  h.name = name;
  h.ambient_dim = 4;
  h.chart = Chart::make(4, d, map, jet);
  const double ext = 1.5 * axes.maxCoeff();
  h.level_set = ImplicitSurface::make(
      4,
      [a, b, c, dd](const auto& x) {
        return (x[0] / a) * (x[0] / a) + (x[1] / b) * (x[1] / b) + (x[2] / c) * (x[2] / c) +
               (x[3] / dd) * (x[3] / dd) - 1.0;
      },
      vec({-ext, -ext, -ext, -ext}), vec({ext, ext, ext, ext}));
  return h;
}

// Boundary of the tubular neighbourhood of radius r of the circle of radius R
// in the (x1, x2) plane: ((R + r cos b) cos a, (R + r cos b) sin a, r sin b cos g, r sin b sin g).
Hypersurface tube(double big, double small) {
  auto map = [big, small](const auto& u) {
    using std::cos;
    using std::sin;
    const auto rho = big + small * cos(u[1]);
    return Point<std::decay_t<decltype(u[0])>>{rho * cos(u[0]), rho * sin(u[0]), small * sin(u[1]) * cos(u[2]),
                                               small * sin(u[1]) * sin(u[2])};
  };
  auto jet = [big, small](const Param& u) {
    const double ca = std::cos(u[0]), sa = std::sin(u[0]);
    const double cb = std::cos(u[1]), sb = std::sin(u[1]);
    const double cg = std::cos(u[2]), sg = std::sin(u[2]);
    const double rho = big + small * cb;
    const double r = small;
    Jet j = empty_jet(4, 3);
    j.position = vec({rho * ca, rho * sa, r * sb * cg, r * sb * sg});
    j.first.col(0) = vec({-rho * sa, rho * ca, 0.0, 0.0});
    j.first.col(1) = vec({-r * sb * ca, -r * sb * sa, r * cb * cg, r * cb * sg});
    j.first.col(2) = vec({0.0, 0.0, -r * sb * sg, r * sb * cg});
    set_second(j, 0, 0, vec({-rho * ca, -rho * sa, 0.0, 0.0}));
    set_second(j, 0, 1, vec({r * sb * sa, -r * sb * ca, 0.0, 0.0}));
    set_second(j, 0, 2, vec({0.0, 0.0, 0.0, 0.0}));
    set_second(j, 1, 1, vec({-r * cb * ca, -r * cb * sa, -r * sb * cg, -r * sb * sg}));
    set_second(j, 1, 2, vec({0.0, 0.0, -r * cb * sg, r * cb * cg}));
    set_second(j, 2, 2, vec({0.0, 0.0, -r * sb * cg, -r * sb * sg}));
    return j;
  };
  Domain d;
  d.dim = 3;
  d.hi = {2.0 * kPi, kPi, 2.0 * kPi};
  d.periodic = {true, false, true};
  Hypersurface h;
  h.name = "tube_s1xs2";
  h.ambient_dim = 4;
  h.chart = Chart::make(4, d, map, jet);
  h.default_grid = {48, 24, 48};
  const double ext = 1.2 * (big + small);
  h.level_set = ImplicitSurface::make(
      4,
      [big, small](const auto& x) {
        using std::sqrt;
        const auto q = sqrt(x[0] * x[0] + x[1] * x[1]) - big;
        return q * q + x[2] * x[2] + x[3] * x[3] - small * small;
      },
      vec({-ext, -ext, -ext, -ext}), vec({ext, ext, ext, ext}));
  return h;
}

Hypersurface mesh_shape(const std::string& name, surfaces::TriMesh m) {
  Hypersurface h;
  h.name = name;
  h.ambient_dim = 3;
  h.representation = Representation::mesh;
  h.mesh = std::make_shared<const surfaces::TriMesh>(std::move(m));
  return h;
}

// ---------------------------------------------------------------------------
// Parameters

class ParamReader {
 public:
  ParamReader(const std::string& shape, const Params& given) : shape_(shape), given_(given) {}

  double get(const std::string& key, double fallback) {
    used_.push_back(key);
    double value = fallback;
    for (const auto& [k, v] : given_) {
      if (k == key) value = v;
    }
    if (!std::isfinite(value)) throw InputError(shape_ + ": parameter '" + key + "' must be finite");
    resolved_.emplace_back(key, value);
    return value;
  }

  void require(bool ok, const std::string& message) const {
    if (!ok) throw InputError(shape_ + ": " + message);
  }

  /// Rejects keys that no get() call consumed.
  Params finish() const {
    for (const auto& [k, v] : given_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        throw InputError(shape_ + ": unknown parameter '" + k + "'");
      }
    }
    return resolved_;
  }

 private:
  std::string shape_;
  const Params& given_;
  std::vector<std::string> used_;
  Params resolved_;
};

Annotation note(int value, Provenance p, std::string text) { return Annotation{value, p, std::move(text)}; }

int chart_mesh_chi(const Chart& c, int n0, int n1) {
  const auto m = surfaces::triangulate_chart(c, n0, n1);
  return m.vertex_count() - m.edge_count + m.face_count();
}

int mesh_chi(const surfaces::TriMesh& m) { return m.vertex_count() - m.edge_count + m.face_count(); }

const std::vector<std::string> kCatalog = {"circle",       "ellipse",  "bumpy_circle", "sphere",      "ellipsoid",
                                           "torus",        "genus2",   "genus2_mesh",  "icosphere",   "tetrahedron",
                                           "torus_mesh",   "sphere3",  "ellipsoid4",   "tube_s1xs2"};

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::topological: return "topological";
    case Provenance::derived_oracle: return "derived-oracle";
    case Provenance::combinatorial: return "combinatorial";
  }
  return "?";
}

double ShapeRecord::param(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  throw InputError(name + ": no parameter '" + std::string(key) + "'");
}

const std::vector<std::string>& catalog() { return kCatalog; }

std::string describe(std::string_view name) {
  if (name == "circle") return "circle(r=1) in R^2";
  if (name == "ellipse") return "ellipse(a=2, b=1) in R^2";
  if (name == "bumpy_circle") return "polar curve 1 + amp cos(k theta) (amp=0.3, k=5) in R^2";
  if (name == "sphere") return "sphere(r=1) in R^3";
  if (name == "ellipsoid") return "ellipsoid(a=1, b=1.3, c=0.7) in R^3";
  if (name == "torus") return "torus(R=2, r=1) in R^3";
  if (name == "genus2") return "genus-2 level set (eps=0.15, cells=160) in R^3";
  if (name == "genus2_mesh") return "genus-2 triangle mesh (file) in R^3";
  if (name == "icosphere") return "icosphere(subdiv=2) mesh in R^3";
  if (name == "tetrahedron") return "regular tetrahedron mesh in R^3";
  if (name == "torus_mesh") return "grid torus mesh (rings=32, segments=32, R=2, r=1) in R^3";
  if (name == "sphere3") return "3-sphere(r=1) in R^4";
  if (name == "ellipsoid4") return "4-ellipsoid(a=1, b=1.2, c=0.8, d=1.1) in R^4";
  if (name == "tube_s1xs2") return "S^1 x S^2 tube(R=2, r=1) in R^4";
  throw InputError("unknown shape '" + std::string(name) + "'");
}

std::string data_dir() {
#ifdef HOPF_DATA_DIR
  return HOPF_DATA_DIR;
#else
  return "data";
#endif
}

int predicted_degree(const ShapeRecord& r) {
  if (r.ambient_dim % 2 == 1) {
    if (!r.chi_h) throw InputError(r.name + ": odd n needs a chi(H) annotation");
    if (r.chi_h->value % 2 != 0) throw InputError(r.name + ": chi(H) must be even for odd n");
    return r.chi_h->value / 2;
  }
  if (!r.chi_w) throw InputError(r.name + ": even n needs a chi(W) annotation");
  return r.chi_w->value;
}

Shape build(std::string_view name_view, const BuildOptions& options) {
  const std::string name(name_view);
  ParamReader p(name, options.params);
  Shape s;
  ShapeRecord& r = s.record;
  r.name = name;
  Hypersurface& h = s.surface;

  if (name == "circle") {
    const double radius = p.get("r", 1.0);
    p.require(radius > 0.0, "radius must be positive");
    h = ellipse_curve(name, radius, radius);
    r.chi_h = note(0, Provenance::derived_oracle, "closed 1-manifold");
    r.chi_w = note(1, Provenance::topological, "W is a disk");
    r.expected_degree = note(1, Provenance::topological, "turning number of an embedded curve");
  } else if (name == "ellipse") {
    const double a = p.get("a", 2.0), b = p.get("b", 1.0);
    p.require(a > 0.0 && b > 0.0, "semi-axes must be positive");
    h = ellipse_curve(name, a, b);
    r.chi_h = note(0, Provenance::derived_oracle, "closed 1-manifold");
    r.chi_w = note(1, Provenance::derived_oracle, "W is a disk; winding oracle");
    r.expected_degree = note(1, Provenance::derived_oracle, "chi(W)");
  } else if (name == "bumpy_circle") {
    const double amp = p.get("amp", 0.3), k = p.get("k", 5.0);
    p.require(amp >= 0.0 && amp < 1.0, "amp must lie in [0, 1) so the radius stays positive");
    p.require(k >= 1.0 && k == std::floor(k), "k must be a positive integer");
    h = bumpy_circle(amp, k);
    r.chi_h = note(0, Provenance::derived_oracle, "closed 1-manifold");
    r.chi_w = note(1, Provenance::derived_oracle, "star-shaped region; winding oracle");
    r.expected_degree = note(1, Provenance::derived_oracle, "chi(W)");
  } else if (name == "sphere" || name == "ellipsoid") {
    double a, b, c;
    if (name == "sphere") {
      a = b = c = p.get("r", 1.0);
    } else {
      a = p.get("a", 1.0);
      b = p.get("b", 1.3);
      c = p.get("c", 0.7);
    }
    p.require(a > 0.0 && b > 0.0 && c > 0.0, "axes must be positive");
    h = ellipsoid3(name, a, b, c);
    r.chi_h = note(chart_mesh_chi(*h.chart, 12, 24), Provenance::combinatorial, "V - E + F of the chart triangulation");
    r.chi_w = note(1, Provenance::derived_oracle, "W is a ball");
    r.expected_degree = note(1, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "torus") {
    const double big = p.get("R", 2.0), small = p.get("r", 1.0);
    p.require(small > 0.0 && big > small, "torus needs R > r > 0");
    h = torus(big, small);
    r.chi_h = note(chart_mesh_chi(*h.chart, 16, 16), Provenance::combinatorial, "V - E + F of the chart triangulation");
    r.chi_w = note(0, Provenance::derived_oracle, "W is a solid torus");
    r.expected_degree = note(0, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "genus2") {
    const double eps = p.get("eps", 0.15);
    const double cells = p.get("cells", 160.0);
    p.require(eps > 0.0 && eps < 0.25, "eps must lie in (0, 0.25) for a genus-2 level set");
    p.require(cells >= 8.0 && cells == std::floor(cells), "cells must be an integer >= 8");
    h = genus2(eps, static_cast<int>(cells));
    r.chi_h = note(mesh_chi(surfaces::marching_tetrahedra(*h.level_set, 48)), Provenance::combinatorial,
                   "V - E + F of a marching-tetrahedra mesh");
    r.chi_w = note(-1, Provenance::derived_oracle, "W is a genus-2 handlebody");
    r.expected_degree = note(-1, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "genus2_mesh") {
    r.file = options.file.empty() ? data_dir() + "/genus2.off" : options.file;
    h = mesh_shape(name, surfaces::load_mesh_file(r.file));
    r.chi_h = note(mesh_chi(*h.mesh), Provenance::combinatorial, "V - E + F of the shipped mesh");
    r.chi_w = note(-1, Provenance::derived_oracle, "W is a genus-2 handlebody");
    r.expected_degree = note(-1, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "icosphere") {
    const double subdiv = p.get("subdiv", 2.0);
    p.require(subdiv >= 0.0 && subdiv <= 6.0 && subdiv == std::floor(subdiv), "subdiv must be an integer in [0, 6]");
    h = mesh_shape(name, surfaces::icosphere(static_cast<int>(subdiv)));
    r.chi_h = note(mesh_chi(*h.mesh), Provenance::combinatorial, "V - E + F");
    r.chi_w = note(1, Provenance::derived_oracle, "W is a ball");
    r.expected_degree = note(1, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "tetrahedron") {
    h = mesh_shape(name, surfaces::regular_tetrahedron());
    r.chi_h = note(mesh_chi(*h.mesh), Provenance::combinatorial, "V - E + F");
    r.chi_w = note(1, Provenance::derived_oracle, "W is a ball");
    r.expected_degree = note(1, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "torus_mesh") {
    const double rings = p.get("rings", 32.0), segments = p.get("segments", 32.0);
    const double big = p.get("R", 2.0), small = p.get("r", 1.0);
    p.require(rings >= 3.0 && segments >= 3.0 && rings == std::floor(rings) && segments == std::floor(segments),
              "rings and segments must be integers >= 3");
    p.require(small > 0.0 && big > small, "torus needs R > r > 0");
    h = mesh_shape(name, surfaces::grid_torus(static_cast<int>(rings), static_cast<int>(segments), big, small));
    r.chi_h = note(mesh_chi(*h.mesh), Provenance::combinatorial, "V - E + F");
    r.chi_w = note(0, Provenance::derived_oracle, "W is a solid torus");
    r.expected_degree = note(0, Provenance::derived_oracle, "chi(H)/2");
  } else if (name == "sphere3" || name == "ellipsoid4") {
    Vec axes(4);
    if (name == "sphere3") {
      axes.setConstant(p.get("r", 1.0));
    } else {
      axes << p.get("a", 1.0), p.get("b", 1.2), p.get("c", 0.8), p.get("d", 1.1);
    }
    p.require(axes.minCoeff() > 0.0, "axes must be positive");
    h = ellipsoid4(name, axes);
    r.chi_h = note(0, Provenance::derived_oracle, "closed odd-dimensional manifold");
    r.chi_w = note(1, Provenance::topological, "W is a 4-ball");
    r.expected_degree = note(1, Provenance::topological, "chi(W)");
  } else if (name == "tube_s1xs2") {
    const double big = p.get("R", 2.0), small = p.get("r", 1.0);
    p.require(small > 0.0 && big > small, "tube needs R > r > 0");
    h = tube(big, small);
    r.chi_h = note(0, Provenance::derived_oracle, "closed odd-dimensional manifold");
    r.chi_w = note(0, Provenance::derived_oracle, "W = S^1 x D^3; boundary Morse count");
    r.expected_degree = note(0, Provenance::derived_oracle, "chi(W)");
  } else {
    throw InputError("unknown shape '" + name + "' (try `hopflab list`)");
  }
  r.params = p.finish();
  r.ambient_dim = h.ambient_dim;
  r.representation = h.representation;

  if (!options.resolution.empty()) {
    if (h.representation == Representation::chart &&
        static_cast<int>(options.resolution.size()) != h.chart->param_dim()) {
      throw InputError(name + ": resolution needs " + std::to_string(h.chart->param_dim()) + " axis counts");
    }
    for (int v : options.resolution) {
      if (v < 8) throw InputError(name + ": resolution must be >= 8 per axis");
    }
    if (h.representation == Representation::implicit) h.implicit_mesh_cells = options.resolution[0];
    h.default_grid = options.resolution;
  }
  if (options.backend) h.backend = surfaces::DiffBackend::parse(*options.backend);

  if (predicted_degree(r) != r.expected_degree.value) {
    throw InputError(name + ": annotated degree " + std::to_string(r.expected_degree.value) +
                     " contradicts the degree predicted from chi (" + std::to_string(predicted_degree(r)) + ")");
  }
  if (r.ambient_dim % 2 == 1 && r.chi_w && r.chi_h && 2 * r.chi_w->value != r.chi_h->value) {
    throw InputError(name + ": chi(H) != 2 chi(W) for odd n");
  }

  if (h.representation == Representation::chart) {
    const int per_axis = h.chart->param_dim() == 3 ? 14 : (h.chart->param_dim() == 2 ? 40 : 400);
    if (!(embeddedness_gap(*h.chart, per_axis) > 1e-6)) throw InputError(name + ": chart is not embedded");
    if (h.ambient_dim == 2 && curve_self_intersects(*h.chart, 512)) {
      throw InputError(name + ": curve intersects itself");
    }
    if (outward_failures(h, 16, 20240101) != 0) throw InputError(name + ": normal is not outward");
  }
  return s;
}

double embeddedness_gap(const Chart& c, int per_axis) {
  const auto& dom = c.domain();
  std::size_t total = 1;
  for (int a = 0; a < dom.dim; ++a) total *= per_axis;
  std::vector<Vec> pts(total);
  for (std::size_t i = 0; i < total; ++i) {
    Param u{};
    std::size_t rest = i;
    for (int a = dom.dim - 1; a >= 0; --a) {
      const std::size_t k = rest % per_axis;
      rest /= per_axis;
      u[a] = dom.lo[a] + (static_cast<double>(k) + (dom.periodic[a] ? 0.0 : 0.5)) * dom.extent(a) / per_axis;
    }
    pts[i] = c.position(u);
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = i + 1; j < total; ++j) gap = std::min(gap, (pts[i] - pts[j]).norm());
  }
  return gap;
}

bool curve_self_intersects(const Chart& c, int samples) {
  const auto& dom = c.domain();
  std::vector<Eigen::Vector2d> pts(samples);
  for (int k = 0; k < samples; ++k) {
    Param u{};
    u[0] = dom.lo[0] + dom.extent(0) * k / samples;
    const Vec p = c.position(u);
    pts[k] = {p[0], p[1]};
  }
  auto cross = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); };
  for (int i = 0; i < samples; ++i) {
    const auto& p0 = pts[i];
    const auto& p1 = pts[(i + 1) % samples];
    for (int j = i + 2; j < samples; ++j) {
      if (i == 0 && j == samples - 1) continue;
      const auto& q0 = pts[j];
      const auto& q1 = pts[(j + 1) % samples];
      const double d1 = cross(p1 - p0, q0 - p0), d2 = cross(p1 - p0, q1 - p0);
      const double d3 = cross(q1 - q0, p0 - q0), d4 = cross(q1 - q0, p1 - q0);
      if (d1 * d2 < 0.0 && d3 * d4 < 0.0) return true;
    }
  }
  return false;
}

namespace {

int polyline_crossings(const std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& o, const Eigen::Vector2d& d) {
  int count = 0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = pts[i];
    const Eigen::Vector2d b = pts[(i + 1) % n];
    Eigen::Matrix2d m;
    m.col(0) = d;
    m.col(1) = a - b;
    if (std::abs(m.determinant()) < 1e-14) continue;
    const Eigen::Vector2d st = m.partialPivLu().solve(a - o);
    if (st[0] > 0.0 && st[1] >= 0.0 && st[1] < 1.0) ++count;
  }
  return count;
}

}  // namespace

int outward_failures(const Hypersurface& h, int samples, std::uint64_t seed) {
  const auto& chart = h.require_chart();
  const auto& dom = chart.domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double scale = 0.0;
  std::vector<Eigen::Vector2d> polyline;
  surfaces::TriMesh tri;
  if (h.ambient_dim == 2) {
    for (int k = 0; k < 2048; ++k) {
      Param u{};
      u[0] = dom.lo[0] + dom.extent(0) * k / 2048.0;
      const Vec p = chart.position(u);
      polyline.emplace_back(p[0], p[1]);
      scale = std::max(scale, p.norm());
    }
  } else if (h.ambient_dim == 3) {
    tri = surfaces::triangulate_chart(chart, 96, 96);
    for (const auto& v : tri.vertices) scale = std::max(scale, v.norm());
  } else {
    h.require_level_set();
    scale = 1.0;
  }
  const double eps = 1e-2 * scale;

  int failures = 0;
  for (int s = 0; s < samples; ++s) {
    Param u{};
    for (int a = 0; a < dom.dim; ++a) u[a] = dom.lo[a] + (0.05 + 0.9 * unit(rng)) * dom.extent(a);
    const auto p = surfaces::gauss_map(h, u);
    Mat full(p.n, p.n);
    full.col(0) = p.normal;
    full.rightCols(p.m) = p.basis;
    if (!(full.determinant() > 0.0)) {
      ++failures;
      continue;
    }
    const Vec out = p.position + eps * p.normal;
    const Vec in = p.position - eps * p.normal;
    if (h.ambient_dim == 2) {
      const double ang = 2.0 * kPi * unit(rng);
      const Eigen::Vector2d dir(std::cos(ang), std::sin(ang));
      const bool out_ok = polyline_crossings(polyline, {out[0], out[1]}, dir) % 2 == 0;
      const bool in_ok = polyline_crossings(polyline, {in[0], in[1]}, dir) % 2 == 1;
      if (!(out_ok && in_ok)) ++failures;
    } else if (h.ambient_dim == 3) {
      Eigen::Vector3d dir(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
      dir.normalize();
      const bool out_ok = surfaces::ray_crossings(tri, out.head<3>(), dir) % 2 == 0;
      const bool in_ok = surfaces::ray_crossings(tri, in.head<3>(), dir) % 2 == 1;
      if (!(out_ok && in_ok)) ++failures;
    } else {
      const auto& level = *h.level_set;
      if (!(level.value(out) > 0.0 && level.value(in) < 0.0)) ++failures;
    }
  }
  return failures;
}

// ---------------------------------------------------------------------------
// Config

namespace {

ConfigEntry parse_entry(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw InputError("config: each shape entry must be an object");
  ConfigEntry e;
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      if (!value.is_string()) throw InputError("config: 'name' must be a string");
      e.name = value.get<std::string>();
    } else if (key == "params") {
      if (!value.is_object()) throw InputError("config: 'params' must be an object");
      for (const auto& [pk, pv] : value.items()) {
        if (pk == "file" && pv.is_string()) {
          e.options.file = pv.get<std::string>();
        } else if (pv.is_number()) {
          e.options.params.emplace_back(pk, pv.get<double>());
        } else {
          throw InputError("config: parameter '" + pk + "' must be a number");
        }
      }
    } else if (key == "resolution") {
      if (!value.is_array()) throw InputError("config: 'resolution' must be an array of integers");
      for (const auto& r : value) {
        if (!r.is_number_integer()) throw InputError("config: 'resolution' must be an array of integers");
        e.options.resolution.push_back(r.get<int>());
      }
    } else if (key == "backend") {
      if (!value.is_string()) throw InputError("config: 'backend' must be a string");
      e.options.backend = value.get<std::string>();
      surfaces::DiffBackend::parse(*e.options.backend);
    } else if (key == "file") {
      if (!value.is_string()) throw InputError("config: 'file' must be a string");
      e.options.file = value.get<std::string>();
    } else {
      throw InputError("config: unknown field '" + key + "'");
    }
  }
  if (e.name.empty()) throw InputError("config: shape entry without a name");
  if (!e.options.file.empty() && std::filesystem::path(e.options.file).is_relative()) {
    e.options.file = (std::filesystem::path(base_dir) / e.options.file).string();
  }
  return e;
}

}  // namespace

Config parse_config(std::string_view json_text, const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  Config cfg;
  const nlohmann::json* shapes = &doc;
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed") {
        if (!value.is_number_unsigned() && !value.is_number_integer()) throw InputError("config: 'seed' must be an integer");
        cfg.seed = value.get<std::uint64_t>();
      } else if (key != "shapes") {
        throw InputError("config: unknown top-level field '" + key + "'");
      }
    }
    if (!doc.contains("shapes")) throw InputError("config: missing 'shapes'");
    shapes = &doc["shapes"];
  }
  if (!shapes->is_array()) throw InputError("config: 'shapes' must be an array");
  for (const auto& entry : *shapes) cfg.shapes.push_back(parse_entry(entry, base_dir));
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<ConfigEntry> default_corpus() {
  std::vector<ConfigEntry> out;
  for (const auto& name : kCatalog) out.push_back(ConfigEntry{name, {}});
  return out;
}

}  // namespace hopf::corpus
