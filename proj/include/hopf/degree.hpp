#pragma once

// Estimators of the degree of the Gauss map.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hopf/surfaces.hpp"

namespace hopf::degree {

using surfaces::Hypersurface;

struct Diagnostics {
  long long nodes = 0;        // quadrature nodes or grid samples evaluated
  int preimages = 0;
  int rejected_draws = 0;     // directions discarded as non-regular
  int draws = 0;
  std::vector<int> resolution;
  std::vector<std::string> notes;
};

struct DegreeEstimate {
  std::string estimator;
  double value = 0.0;
  double error = 0.0;  // 0 for integer-valued estimators
  int rounded = 0;
  Diagnostics diagnostics;

  double rounding_gap() const;
  /// |value - rounded| <= max(error, tolerance).
  bool consistent(double tolerance = 0.0) const;
};

/// sum_nodes w f at `resolution` and at half resolution (>= 8 per axis); the
/// difference is the error bar. Empty resolution means the shape default.
DegreeEstimate quadrature_estimate(std::string name, const Hypersurface& h, std::span<const int> resolution,
                                   const std::function<double(const surfaces::QuadratureNode&)>& integrand);

/// Uniform direction on S^{n-1}: a normalized standard Gaussian draw.
Vec random_direction(int n, std::mt19937_64& rng);

/// vol(S^{n-1}) for n = 2, 3, 4.
double sphere_volume(int n);

struct Preimage {
  Param u{};          // chart parameter, or ambient point for implicit shapes
  Vec position;
  double jacobian = 0.0;  // det of the Gauss-map differential = det S
  int sign = 0;
};

struct PreimageSearch {
  std::vector<Preimage> points;
  bool regular = true;  // false: small |det| or a stalled Newton run
  std::string reason;
  int grid = 0;
  long long samples = 0;
};

/// Solves nu(u) = v by a grid scan for local minima of |nu - v| followed by
/// Newton on B^T nu(u) = 0 (B spans v^perp). Roots closer than 1e-6 in
/// parameter distance are merged; when two seeds land on the same root the
/// grid is doubled once. Implicit shapes are seeded from a surface mesh.
class PreimageFinder {
 public:
  explicit PreimageFinder(const Hypersurface& h, int grid = 64);
  ~PreimageFinder();
  PreimageFinder(PreimageFinder&&) noexcept;

  PreimageSearch find(const Vec& v) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PreimageSearch find_preimages(const Hypersurface& h, const Vec& v, int grid = 64);

/// Signed preimage count of a seeded random regular value (up to 16 draws).
DegreeEstimate degree_preimage(const Hypersurface& h, std::uint64_t seed, int grid = 64);
DegreeEstimate degree_preimage(const PreimageFinder& finder, int n, std::uint64_t seed);

/// (1 / vol S^{n-1}) integral_H det S dVol.
DegreeEstimate degree_gk(const Hypersurface& h, std::span<const int> resolution = {});

/// (1/2) integral_H of the Euler form (odd n, chart shapes).
DegreeEstimate degree_pfaffian(const Hypersurface& h, std::span<const int> resolution = {});

/// Turning of the normal angle over one period / 2 pi (n = 2). The sample
/// count doubles (up to 4 times) while adjacent normals are >= 90 degrees apart.
DegreeEstimate winding_number(const Hypersurface& h, int resolution = 256);

/// Sum of angle defects / 4 pi.
DegreeEstimate degree_mesh(const surfaces::TriMesh& m);

}  // namespace hopf::degree
