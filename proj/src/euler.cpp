#include "hopf/euler.hpp"

#include <cmath>
#include <random>

#include "hopf/connection.hpp"
#include "hopf/error.hpp"

namespace hopf::euler {

int chi_mesh(const surfaces::TriMesh& m) { return m.vertex_count() - m.edge_count + m.face_count(); }

namespace {

constexpr double kNondegenerate = 1e-8;

// Eigenvalues of the height Hessian relative to the metric at a critical point.
Vec hessian_eigenvalues(const surfaces::Hypersurface& h, const Param& u, const Vec& v) {
  if (h.representation == surfaces::Representation::chart) {
    const auto& chart = h.require_chart();
    const auto jet = chart.jet(u, h.backend);
    const auto gamma = connection::christoffel_from_jet(jet);
    const int m = jet.m;
    Mat hess(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double value = jet.second[i][j].dot(v);
        for (int k = 0; k < m; ++k) value -= gamma[k][i][j] * jet.first.col(k).dot(v);
        hess(i, j) = value;
      }
    }
    const Mat g = jet.first.transpose() * jet.first;
    const Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(hess, g);
    return solver.eigenvalues();
  }
  // Level set: the height restricted to {F = 0} has Hessian -<nu, v> II in
  // the orthonormal tangent frame.
  const auto p = surfaces::gauss_map(h, u);
  const Mat hess = -p.normal.dot(v) * p.shape;
  const Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (hess + hess.transpose()));
  return solver.eigenvalues();
}

}  // namespace

std::optional<std::vector<CriticalPoint>> critical_points(const degree::PreimageFinder& finder,
                                                          const surfaces::Hypersurface& h, const Vec& v,
                                                          std::string* reason) {
  std::vector<CriticalPoint> out;
  for (int side = 0; side < 2; ++side) {
    const Vec target = side == 0 ? v : Vec(-v);
    const auto search = finder.find(target);
    if (!search.regular) {
      if (reason) *reason = search.reason;
      return std::nullopt;
    }
    for (const auto& pre : search.points) {
      const Vec eig = hessian_eigenvalues(h, pre.u, v);
      CriticalPoint c;
      c.u = pre.u;
      c.height = pre.position.dot(v);
      c.inward = side == 1;
      c.min_abs_eigenvalue = eig.cwiseAbs().minCoeff();
      if (c.min_abs_eigenvalue <= kNondegenerate) {
        if (reason) *reason = "degenerate critical point (|eigenvalue| <= 1e-8)";
        return std::nullopt;
      }
      for (int k = 0; k < eig.size(); ++k) c.index += eig[k] < 0.0 ? 1 : 0;
      c.sign = c.index % 2 == 0 ? 1 : -1;
      out.push_back(c);
    }
  }
  return out;
}

MorseCount chi_morse(const degree::PreimageFinder& finder, const surfaces::Hypersurface& h, const Vec& v,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MorseCount result;
  Vec dir = v / v.norm();
  for (int attempt = 0; attempt <= 16; ++attempt) {
    std::string reason;
    const auto points = critical_points(finder, h, dir, &reason);
    if (points) {
      result.direction = dir;
      result.points = *points;
      for (const auto& c : result.points) {
        result.chi += c.sign;
        if (c.inward) result.solid_chi += c.sign;
      }
      return result;
    }
    ++result.rejected_directions;
    result.notes.push_back("direction rejected: " + reason);
    dir = degree::random_direction(h.ambient_dim, rng);
  }
  throw NonRegularValueError("chi_morse: no nondegenerate height function after 16 resamples");
}

MorseCount chi_morse(const surfaces::Hypersurface& h, const Vec& v, std::uint64_t seed, int grid) {
  return chi_morse(degree::PreimageFinder(h, grid), h, v, seed);
}

SolidEuler chi_solid(const corpus::Shape& shape, std::uint64_t seed) {
  if (!shape.record.chi_w) throw InputError("shape '" + shape.record.name + "' has no chi(W) annotation");
  SolidEuler s;
  s.annotated = shape.record.chi_w->value;
  if (shape.surface.representation == surfaces::Representation::chart) {
    std::mt19937_64 rng(seed);
    const Vec v = degree::random_direction(shape.surface.ambient_dim, rng);
    s.morse = chi_morse(shape.surface, v, seed).solid_chi;
    s.agrees = *s.morse == s.annotated;
  }
  return s;
}

}  // namespace hopf::euler
