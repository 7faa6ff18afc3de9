#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hopf/corpus.hpp"
#include "hopf/degree.hpp"
#include "hopf/error.hpp"
#include "hopf/mesh.hpp"

using namespace hopf;
using namespace hopf::degree;

namespace {

constexpr double kPi = std::numbers::pi;

Vec unit(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v.normalized();
}

}  // namespace

TEST_CASE("sphere volumes") {
  CHECK(sphere_volume(2) == doctest::Approx(2 * kPi));
  CHECK(sphere_volume(3) == doctest::Approx(4 * kPi));
  CHECK(sphere_volume(4) == doctest::Approx(2 * kPi * kPi));
}

TEST_CASE("random directions are unit and centred") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3, 4}) {
    Vec mean = Vec::Zero(n);
    for (int k = 0; k < 20000; ++k) {
      const Vec v = random_direction(n, rng);
      CHECK(std::abs(v.norm() - 1.0) < 1e-14);
      mean += v / 20000.0;
    }
    CHECK(mean.norm() < 0.03);
  }
}

TEST_CASE("preimages on the sphere and ellipsoid solve nu = v") {
  const auto sphere = corpus::build("sphere");
  const Vec v = unit({0.2, -0.5, 0.7});
  const auto s = find_preimages(sphere.surface, v);
  REQUIRE(s.regular);
  REQUIRE(s.points.size() == 1);
  CHECK((s.points[0].position - v).norm() < 1e-12);
  CHECK(s.points[0].sign == 1);
  CHECK(s.points[0].jacobian == doctest::Approx(1.0));

  const auto ell = corpus::build("ellipsoid");
  const auto e = find_preimages(ell.surface, v);
  REQUIRE(e.points.size() == 1);
  CHECK((surfaces::gauss_map(ell.surface, e.points[0].u).normal - v).norm() < 1e-11);
}

TEST_CASE("torus and tube: one elliptic and one hyperbolic preimage") {
  const auto torus = corpus::build("torus");
  const auto t = find_preimages(torus.surface, unit({0.3, 0.4, 0.5}));
  REQUIRE(t.regular);
  REQUIRE(t.points.size() == 2);
  CHECK(t.points[0].sign + t.points[1].sign == 0);
  const auto tube = corpus::build("tube_s1xs2");
  const auto u = find_preimages(tube.surface, unit({0.3, 0.4, 0.5, -0.2}));
  REQUIRE(u.points.size() == 2);
  CHECK(u.points[0].sign + u.points[1].sign == 0);
}

TEST_CASE("a direction with a circle of preimages is flagged non-regular") {
  const auto torus = corpus::build("torus");
  const auto t = find_preimages(torus.surface, unit({0.0, 0.0, 1.0}));
  CHECK_FALSE(t.regular);
}

TEST_CASE("property: preimage degree is seed-independent over 32 seeds") {
  for (const char* name : {"circle", "bumpy_circle", "sphere", "ellipsoid", "torus", "genus2", "sphere3", "tube_s1xs2"}) {
    CAPTURE(name);
    const auto s = corpus::build(name);
    const PreimageFinder finder(s.surface);
    const int expected = s.record.expected_degree.value;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      const auto e = degree_preimage(finder, s.surface.ambient_dim, seed);
      CHECK(e.value == expected);
      CHECK(e.error == 0.0);
    }
  }
}

TEST_CASE("Gauss-Kronecker integrals and their error bars") {
  const auto ell = corpus::build("ellipsoid");
  const std::vector<int> coarse{8, 16}, fine{48, 96};
  const auto a = degree_gk(ell.surface, coarse);
  const auto b = degree_gk(ell.surface, fine);
  CHECK(std::abs(b.value - 1.0) < 1e-12);
  CHECK(std::abs(a.value - 1.0) <= a.error + 1e-12);
  CHECK(b.error < a.error);
  const auto tube = corpus::build("tube_s1xs2");
  CHECK(std::abs(degree_gk(tube.surface).value) < 1e-10);
}

TEST_CASE("winding number of closed curves") {
  for (const char* name : {"circle", "ellipse", "bumpy_circle"}) {
    const auto s = corpus::build(name);
    const auto e = winding_number(s.surface);
    CHECK(e.rounded == 1);
    CHECK(std::abs(e.value - 1.0) < 1e-12);
  }
  const auto wild = corpus::build("bumpy_circle", {{{"amp", 0.6}, {"k", 9}}});
  CHECK(winding_number(wild.surface).rounded == 1);
  CHECK_THROWS_AS(winding_number(wild.surface, 8), ResolutionError);
  CHECK_THROWS_AS(winding_number(wild.surface, 4), InputError);
  const auto sphere = corpus::build("sphere");
  CHECK_THROWS_AS(winding_number(sphere.surface), InputError);
}

TEST_CASE("mesh degree is the total angle defect over 4 pi") {
  CHECK(degree_mesh(surfaces::icosphere(2)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(degree_mesh(surfaces::grid_torus(16, 24)).value) < 1e-12);
  const auto g2 = corpus::build("genus2_mesh");
  const auto e = degree_mesh(*g2.surface.mesh);
  CHECK(e.rounded == -1);
  CHECK(e.error < 1e-9);
}

TEST_CASE("Pfaffian estimator needs odd n; preimages need a chart or level set") {
  const auto circle = corpus::build("circle");
  CHECK_THROWS_AS(degree_pfaffian(circle.surface), UnsupportedParityError);
  const auto ico = corpus::build("icosphere");
  CHECK_THROWS_AS(PreimageFinder(ico.surface), InputError);
}

TEST_CASE("DegreeEstimate consistency semantics") {
  DegreeEstimate e;
  e.value = 0.97;
  e.rounded = 1;
  e.error = 0.01;
  CHECK(e.rounding_gap() == doctest::Approx(0.03));
  CHECK_FALSE(e.consistent());
  CHECK(e.consistent(0.05));
  e.error = 0.05;
  CHECK(e.consistent());
}
