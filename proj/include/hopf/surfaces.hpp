#pragma once

// Hypersurface representations and their differential geometry at a point.
//
// Orientation: the outward normal comes first. For a chart this means
// det[nu, d1 psi, ..., d(n-1) psi] > 0, i.e. nu is the normalized cofactor
// normal of the coordinate vectors; corpus charts are built so that this
// normal points out of the bounded region.
//
// Sign convention: II_ij = <d_i nu, d_j psi> = -<d_ij psi, nu> and
// S = g^{-1} II, so the unit sphere has S = +I and d nu = +S.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hopf/dual.hpp"
#include "hopf/linalg.hpp"

namespace hopf::surfaces {

struct Domain {
  int dim = 0;
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  std::array<bool, 3> periodic{};

  double extent(int axis) const { return hi[axis] - lo[axis]; }
};

/// Position with first and second parameter derivatives.
struct Jet {
  int n = 0;
  int m = 0;
  Vec position;
  Mat first;                                 // n x m, column i = d psi / du_i
  std::array<std::array<Vec, 3>, 3> second;  // second[i][j] = d2 psi / du_i du_j
};

struct DiffBackend {
  enum class Kind { analytic, dual, finite_difference };

  Kind kind = Kind::analytic;
  double h1 = 1e-5;  // first-derivative step
  double h2 = 5e-4;  // second-derivative step

  static DiffBackend parse(std::string_view name);
  std::string name() const;
};

class Chart {
 public:
  using MapFn = std::function<Point<double>(const std::array<double, 3>&)>;
  using DualMapFn = std::function<Point<Dual2>(const std::array<Dual2, 3>&)>;
  using Dual3MapFn = std::function<Point<Dual3>(const std::array<Dual3, 3>&)>;
  using Third = std::array<std::array<std::array<Vec, 3>, 3>, 3>;
  using JetFn = std::function<Jet(const Param&)>;

  /// `generic_map` must accept std::array<T, 3> for T = double, Dual2, Dual3.
  template <class F>
  static Chart make(int ambient_dim, const Domain& domain, F generic_map, JetFn analytic = {}) {
    Chart c;
    c.n_ = ambient_dim;
    c.domain_ = domain;
    c.map_ = generic_map;
    c.dual_map_ = generic_map;
    c.dual3_map_ = generic_map;
    c.analytic_ = std::move(analytic);
    return c;
  }

  int ambient_dim() const { return n_; }
  int param_dim() const { return domain_.dim; }
  const Domain& domain() const { return domain_; }
  bool has_analytic_jets() const { return static_cast<bool>(analytic_); }

  Vec position(const Param& u) const;
  Jet jet(const Param& u, const DiffBackend& backend) const;
  /// third[a][b][c] = d3 psi / du_a du_b du_c, exact (nested duals).
  Third third_derivatives(const Param& u) const;

  /// Periodic coordinates reduced into [lo, hi).
  Param wrap(Param u) const;
  /// Max-norm distance with periodic identification.
  double param_distance(const Param& a, const Param& b) const;
  /// True when every non-periodic coordinate lies strictly inside its interval.
  bool contains(const Param& u) const;

 private:
  Jet analytic_jet(const Param& u) const;
  Jet dual_jet(const Param& u) const;
  Jet fd_jet(const Param& u, double h1, double h2) const;

  int n_ = 0;
  Domain domain_;
  MapFn map_;
  DualMapFn dual_map_;
  Dual3MapFn dual3_map_;
  JetFn analytic_;
};

/// Level set {F = 0} with F < 0 on the bounded side. Derivatives come from
/// forward-mode dual numbers.
class ImplicitSurface {
 public:
  using LevelFn = std::function<double(const Point<double>&)>;
  using Dual1Fn = std::function<Dual1(const Point<Dual1>&)>;
  using Dual2Fn = std::function<Dual2(const Point<Dual2>&)>;

  struct Derivatives {
    double value = 0.0;
    Vec gradient;
    Mat hessian;
  };

  template <class F>
  static ImplicitSurface make(int ambient_dim, F generic_level, Vec box_lo, Vec box_hi) {
    ImplicitSurface s;
    s.n_ = ambient_dim;
    s.f_ = generic_level;
    s.f1_ = generic_level;
    s.f2_ = generic_level;
    s.lo_ = std::move(box_lo);
    s.hi_ = std::move(box_hi);
    return s;
  }

  int ambient_dim() const { return n_; }
  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Derivatives derivatives(const Vec& x) const;

  /// Newton projection onto the level set along the gradient.
  Vec project(const Vec& x, int max_iterations = 50) const;

 private:
  int n_ = 0;
  LevelFn f_;
  Dual1Fn f1_;
  Dual2Fn f2_;
  Vec lo_;
  Vec hi_;
};

struct TriMesh;

enum class Representation { chart, implicit, mesh };
std::string_view to_string(Representation r);

struct Hypersurface {
  std::string name;
  int ambient_dim = 0;
  Representation representation = Representation::chart;
  std::optional<Chart> chart;
  /// Primary for implicit shapes; for chart shapes an ambient level function
  /// describing the same hypersurface (orientation checks, ambient extension).
  std::optional<ImplicitSurface> level_set;
  std::shared_ptr<const TriMesh> mesh;
  DiffBackend backend;
  /// Cells along the longest box axis for the implicit quadrature mesh.
  int implicit_mesh_cells = 160;
  /// Per-axis quadrature counts used when none are given; empty = built-in.
  std::vector<int> default_grid;

  int dim() const { return ambient_dim - 1; }
  const Chart& require_chart() const;
  const ImplicitSurface& require_level_set() const;
};

struct GaussPoint {
  Param u{};
  int n = 0;
  int m = 0;
  Vec position;
  Vec normal;               // outward unit normal: the Gauss map value
  Mat basis;                // n x m coordinate tangent vectors
  Mat frame;                // n x m orthonormal, (normal, frame) positive
  Mat metric;               // g, m x m
  Mat second_form;          // II, m x m
  Mat shape;                // S = g^{-1} II
  Mat normal_derivative;    // n x m, column i = d nu / du_i
  double volume_element = 0.0;
};

GaussPoint gauss_point_from_jet(const Jet& jet, const Param& u);
GaussPoint implicit_gauss_point(const ImplicitSurface& s, const Vec& x);

/// Gauss map and fundamental forms at chart parameter u (chart shapes) or at
/// an ambient point on the level set (implicit shapes).
GaussPoint gauss_map(const Hypersurface& h, const Param& u);

/// Matrix of the shape operator in the chart basis.
Mat shape_operator(const GaussPoint& p);

/// d nu / du_i from differentiating the normalized cofactor normal, an
/// independent route to the Weingarten relation used in gauss_point_from_jet.
Vec normal_derivative_cofactor(const Jet& jet, int i);

struct QuadratureNode {
  Param u{};
  double weight = 0.0;  // parameter-space weight (multiply by volume_element)
};

struct QuadratureRule {
  std::vector<QuadratureNode> nodes;
  std::vector<int> resolution;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor rule on a chart (trapezoid on periodic axes, Gauss-Legendre
/// otherwise), or projected triangle rule on an implicit surface.
QuadratureRule quadrature(const Hypersurface& h, std::span<const int> resolution);

/// Resolution vector used when the caller does not specify one.
std::vector<int> default_resolution(const Hypersurface& h);

/// Sum over nodes of weight * fn(node) (parallel over nodes, pairwise reduction).
double integrate_nodes(const QuadratureRule& rule,
                       const std::function<double(const QuadratureNode&)>& fn);

/// integral over H of f dVol.
double integrate_function(const Hypersurface& h, const QuadratureRule& rule,
                          const std::function<double(const GaussPoint&)>& f);

}  // namespace hopf::surfaces
