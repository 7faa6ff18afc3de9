#pragma once

// Euler-characteristic oracles: combinatorial, Morse counting of height
// functions, and the annotated chi(W) with its boundary Morse cross-check.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopf/corpus.hpp"
#include "hopf/degree.hpp"
#include "hopf/mesh.hpp"

namespace hopf::euler {

struct CriticalPoint {
  Param u{};
  double height = 0.0;
  int index = 0;
  int sign = 1;          // (-1)^index
  bool inward = false;   // normal = -v
  double min_abs_eigenvalue = 0.0;
};

int chi_mesh(const surfaces::TriMesh& m);

/// Critical points of <psi, v> on H and their Morse indices (covariant
/// Hessian against the metric). Empty optional when v is not usable
/// (non-regular for the Gauss map, or an eigenvalue below 1e-8).
std::optional<std::vector<CriticalPoint>> critical_points(const degree::PreimageFinder& finder,
                                                          const surfaces::Hypersurface& h, const Vec& v,
                                                          std::string* reason = nullptr);

struct MorseCount {
  int chi = 0;
  int solid_chi = 0;  // sum over inward critical points
  Vec direction;
  std::vector<CriticalPoint> points;
  int rejected_directions = 0;
  std::vector<std::string> notes;
};

/// Tries v, then up to 16 seeded random directions. Throws
/// NonRegularValueError when every direction is degenerate.
MorseCount chi_morse(const degree::PreimageFinder& finder, const surfaces::Hypersurface& h, const Vec& v,
                     std::uint64_t seed);
MorseCount chi_morse(const surfaces::Hypersurface& h, const Vec& v, std::uint64_t seed, int grid = 64);

struct SolidEuler {
  int annotated = 0;
  std::optional<int> morse;  // boundary Morse count, when the shape admits it
  bool agrees = true;
};

/// Annotated chi(W), cross-checked by the inward critical point count for
/// chart shapes. Throws InputError when the annotation is missing.
SolidEuler chi_solid(const corpus::Shape& shape, std::uint64_t seed = 1);

}  // namespace hopf::euler
