#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hopf/corpus.hpp"
#include "hopf/error.hpp"
#include "hopf/mesh.hpp"

using namespace hopf;
using namespace hopf::surfaces;

namespace {

constexpr double kPi = std::numbers::pi;

int chi(const TriMesh& m) { return m.vertex_count() - m.edge_count + m.face_count(); }

double defect_sum(const TriMesh& m) {
  double s = 0.0;
  for (double d : m.angle_defects) s += d;
  return s;
}

const char* kOctahedronOff =
    "OFF\n6 8 0\n"
    "1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n"
    "3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n"
    "3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n";

}  // namespace

TEST_CASE("generated meshes have the expected counts") {
  const auto ico = icosphere(2);
  CHECK(ico.vertex_count() == 162);
  CHECK(ico.edge_count == 480);
  CHECK(ico.face_count() == 320);
  const auto tet = regular_tetrahedron();
  CHECK(tet.vertex_count() == 4);
  CHECK(tet.edge_count == 6);
  const auto tor = grid_torus(32, 32);
  CHECK(tor.vertex_count() == 1024);
  CHECK(tor.edge_count == 3072);
  CHECK(tor.face_count() == 2048);
  CHECK(chi(tor) == 0);
}

TEST_CASE("property: angle defects sum to 2 pi chi on every mesh") {
  std::vector<TriMesh> meshes{icosphere(0), icosphere(3), regular_tetrahedron(), grid_torus(7, 11, 3.0, 0.5),
                              grid_torus(32, 32), load_mesh_file(corpus::data_dir() + "/genus2.off"),
                              ingest_mesh(kOctahedronOff)};
  for (const auto& m : meshes) {
    CHECK(std::abs(defect_sum(m) - 2 * kPi * chi(m)) <= 1e-9);
  }
}

TEST_CASE("shipped genus-2 mesh is closed with chi = -2") {
  const auto m = load_mesh_file(corpus::data_dir() + "/genus2.off");
  CHECK(chi(m) == -2);
  CHECK(signed_volume(m) > 0.0);
}

TEST_CASE("OFF and OBJ ingest, OFF round trip") {
  const auto oct = ingest_mesh(kOctahedronOff);
  CHECK(oct.vertex_count() == 6);
  CHECK(oct.edge_count == 12);
  CHECK(signed_volume(oct) == doctest::Approx(4.0 / 3.0));
  const auto again = ingest_mesh(to_off(oct));
  CHECK(again.faces == oct.faces);
  CHECK(again.vertex_count() == 6);

  const char* obj =
      "# tetra\nv 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\n"
      "f 1 2 3\nf 1 3 4\nf 1 4 2\nf 2 4 3\n";
  const auto tet = ingest_mesh(obj);
  CHECK(tet.face_count() == 4);
  CHECK(signed_volume(tet) > 0.0);
}

TEST_CASE("inside-out meshes are flipped to positive volume") {
  std::string flipped = "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n";
  const auto a = ingest_mesh(flipped);
  std::string inverted = "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 2 1\n3 0 3 2\n3 0 1 3\n3 1 2 3\n";
  const auto b = ingest_mesh(inverted);
  CHECK(signed_volume(a) == doctest::Approx(signed_volume(b)));
  CHECK(signed_volume(a) > 0.0);
}

TEST_CASE("malformed meshes are rejected") {
  CHECK_THROWS_AS(ingest_mesh(""), MeshIngestError);
  CHECK_THROWS_AS(ingest_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"), MeshIngestError);  // open
  CHECK_THROWS_AS(ingest_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"), MeshIngestError);  // bad index
  CHECK_THROWS_AS(ingest_mesh("OFF\n3 1 0\n0 0 x\n1 0 0\n0 1 0\n3 0 1 2\n"), MeshIngestError);  // bad token
  // Two tetrahedra faces with inconsistent winding on a shared edge.
  CHECK_THROWS_AS(
      ingest_mesh("OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 2 3\n"),
      MeshIngestError);
  CHECK_THROWS_AS(load_mesh_file("/nonexistent/mesh.off"), InputError);
}

TEST_CASE("marching tetrahedra and chart triangulations recover chi") {
  auto sphere = ImplicitSurface::make(
      3, [](const auto& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0; }, Vec::Constant(3, -1.3),
      Vec::Constant(3, 1.3));
  const auto m = marching_tetrahedra(sphere, 20);
  CHECK(chi(m) == 2);
  CHECK(signed_volume(m) == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.03));
  const auto torus = corpus::build("torus");
  CHECK(chi(triangulate_chart(*torus.surface.chart, 12, 20)) == 0);
  const auto sph = corpus::build("sphere");
  CHECK(chi(triangulate_chart(*sph.surface.chart, 10, 20)) == 2);
}

TEST_CASE("level sets through grid nodes still give closed, consistently oriented meshes") {
  // Box [-1.5, 1.5] with 48 cells puts nodes exactly on the unit sphere.
  auto sphere = ImplicitSurface::make(
      3, [](const auto& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0; }, Vec::Constant(3, -1.5),
      Vec::Constant(3, 1.5));
  for (int cells : {12, 24, 48}) {
    const auto m = marching_tetrahedra(sphere, cells);
    CHECK(chi(m) == 2);
    CHECK(signed_volume(m) > 0.0);
    CHECK(std::abs(defect_sum(m) - 4 * kPi) <= 1e-9);
  }
}

TEST_CASE("ray parity distinguishes inside from outside") {
  const auto m = icosphere(2);
  const Eigen::Vector3d dir = Eigen::Vector3d(0.3, 0.5, 0.81).normalized();
  CHECK(ray_crossings(m, Eigen::Vector3d(0.1, -0.2, 0.05), dir) % 2 == 1);
  CHECK(ray_crossings(m, Eigen::Vector3d(1.5, 0.0, 0.0), dir) % 2 == 0);
}
