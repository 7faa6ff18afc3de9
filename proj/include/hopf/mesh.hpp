#pragma once

// Closed, consistently oriented triangle meshes in R^3.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hopf/surfaces.hpp"

namespace hopf::surfaces {

struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<double> angle_defects;  // per vertex, filled by validate_mesh
  int edge_count = 0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
};

/// Checks closedness and orientation consistency, flips globally when the
/// signed volume is negative, counts edges and caches angle defects. Throws
/// MeshIngestError naming the offending edge.
TriMesh validate_mesh(TriMesh mesh);

/// Parses OFF or OBJ (triangles only), detected from the payload.
TriMesh ingest_mesh(std::string_view payload);
TriMesh load_mesh_file(const std::string& path);
std::string to_off(const TriMesh& mesh);

/// 2 pi - sum of incident face angles.
double angle_defect(const TriMesh& m, int vertex);
double signed_volume(const TriMesh& m);

TriMesh regular_tetrahedron();
TriMesh icosphere(int subdivisions);
/// Grid torus with `rings` x `segments` vertices (both axes periodic).
TriMesh grid_torus(int rings, int segments, double major = 2.0, double minor = 1.0);

/// Marching tetrahedra (Freudenthal split of a regular grid) on the level set;
/// faces oriented towards F > 0. `cells` is the count along the longest axis.
TriMesh marching_tetrahedra(const ImplicitSurface& s, int cells);

/// Triangulates a two-parameter chart in R^3 on a uniform grid, welding
/// coincident vertices (poles, seams) and dropping collapsed triangles.
TriMesh triangulate_chart(const Chart& c, int n0, int n1);

/// Number of mesh triangles hit by the ray origin + s * direction, s > 0.
int ray_crossings(const TriMesh& m, const Eigen::Vector3d& origin, const Eigen::Vector3d& direction);

}  // namespace hopf::surfaces
