#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hopf/corpus.hpp"
#include "hopf/error.hpp"
#include "hopf/surfaces.hpp"

using namespace hopf;
using namespace hopf::surfaces;

namespace {

constexpr double kPi = std::numbers::pi;

double max_jet_gap(const Jet& a, const Jet& b) {
  double gap = (a.position - b.position).cwiseAbs().maxCoeff();
  gap = std::max(gap, (a.first - b.first).cwiseAbs().maxCoeff());
  for (int i = 0; i < a.m; ++i) {
    for (int j = 0; j < a.m; ++j) gap = std::max(gap, (a.second[i][j] - b.second[i][j]).cwiseAbs().maxCoeff());
  }
  return gap;
}

std::vector<std::string> chart_shapes() {
  return {"circle", "ellipse", "bumpy_circle", "sphere", "ellipsoid", "torus", "sphere3", "ellipsoid4", "tube_s1xs2"};
}

Param random_param(const Chart& c, std::mt19937_64& rng) {
  const auto& dom = c.domain();
  Param u{};
  for (int a = 0; a < dom.dim; ++a) {
    const double margin = dom.periodic[a] ? 0.0 : 0.02 * dom.extent(a);
    u[a] = std::uniform_real_distribution<double>(dom.lo[a] + margin, dom.hi[a] - margin)(rng);
  }
  return u;
}

}  // namespace

TEST_CASE("backend names round-trip and reject unknown names") {
  for (const char* name : {"analytic", "dual", "fd"}) CHECK(DiffBackend::parse(name).name() == name);
  CHECK_THROWS_AS(DiffBackend::parse("symbolic"), InputError);
}

TEST_CASE("Gauss-Legendre integrates degree 2k-1 polynomials exactly") {
  for (int count : {1, 2, 5, 16, 64}) {
    std::vector<double> x, w;
    gauss_legendre(count, x, w);
    REQUIRE(x.size() == static_cast<std::size_t>(count));
    for (int p = 0; p <= 2 * count - 1; ++p) {
      double sum = 0.0;
      for (int k = 0; k < count; ++k) sum += w[k] * std::pow(x[k], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("round sphere: metric, shape operator and normal") {
  const double r = 2.5;
  const auto shape = corpus::build("sphere", {{{"r", r}}});
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Param u = random_param(*shape.surface.chart, rng);
    const auto p = gauss_map(shape.surface, u);
    CHECK((p.normal - p.position / r).norm() < 1e-14);
    CHECK(p.volume_element == doctest::Approx(r * r * std::sin(u[0])).epsilon(1e-13));
    CHECK((shape_operator(p) - Mat::Identity(2, 2) / r).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((p.frame.transpose() * p.frame - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    Mat full(3, 3);
    full.col(0) = p.normal;
    full.rightCols(2) = p.frame;
    CHECK(full.determinant() > 0.0);
  }
}

TEST_CASE("Weingarten derivative agrees with the differentiated cofactor normal") {
  std::mt19937_64 rng(5);
  for (const auto& name : chart_shapes()) {
    const auto shape = corpus::build(name);
    const auto& chart = *shape.surface.chart;
    for (int trial = 0; trial < 20; ++trial) {
      const Param u = random_param(chart, rng);
      const Jet jet = chart.jet(u, {});
      const auto p = gauss_point_from_jet(jet, u);
      for (int i = 0; i < jet.m; ++i) {
        CHECK((normal_derivative_cofactor(jet, i) - p.normal_derivative.col(i)).norm() < 1e-11);
      }
    }
  }
}

TEST_CASE("property: analytic jets agree with dual (1e-9) and finite-difference (1e-5) jets") {
  DiffBackend dual{DiffBackend::Kind::dual};
  DiffBackend fd{DiffBackend::Kind::finite_difference};
  std::mt19937_64 rng(2024);
  for (const auto& name : chart_shapes()) {
    CAPTURE(name);
    const auto shape = corpus::build(name);
    const auto& chart = *shape.surface.chart;
    REQUIRE(chart.has_analytic_jets());
    double worst_dual = 0.0, worst_fd = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Param u = random_param(chart, rng);
      const Jet a = chart.jet(u, {});
      worst_dual = std::max(worst_dual, max_jet_gap(a, chart.jet(u, dual)));
      worst_fd = std::max(worst_fd, max_jet_gap(a, chart.jet(u, fd)));
    }
    CHECK(worst_dual <= 1e-9);
    CHECK(worst_fd <= 1e-5);
  }
}

TEST_CASE("third derivatives are symmetric and match differences of second derivatives") {
  const auto shape = corpus::build("torus");
  const auto& chart = *shape.surface.chart;
  const Param u{0.7, 2.1, 0.0, 0.0};
  const auto third = chart.third_derivatives(u);
  const double h = 1e-5;
  for (int a = 0; a < 2; ++a) {
    Param up = u, dn = u;
    up[a] += h;
    dn[a] -= h;
    const Jet jp = chart.jet(up, {}), jm = chart.jet(dn, {});
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const Vec fd = (jp.second[b][c] - jm.second[b][c]) / (2 * h);
        CHECK((third[a][b][c] - fd).norm() < 1e-8);
        CHECK((third[a][b][c] - third[b][a][c]).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("chart quadrature reproduces closed-form areas") {
  SUBCASE("sphere area 4 pi r^2") {
    const auto s = corpus::build("sphere", {{{"r", 1.7}}});
    const std::vector<int> res{32, 64};
    const auto rule = quadrature(s.surface, res);
    const double area = integrate_function(s.surface, rule, [](const GaussPoint&) { return 1.0; });
    CHECK(area == doctest::Approx(4 * kPi * 1.7 * 1.7).epsilon(1e-13));
  }
  SUBCASE("torus area 4 pi^2 R r") {
    const auto s = corpus::build("torus");
    const std::vector<int> res{32, 32};
    const double area = integrate_function(s.surface, quadrature(s.surface, res), [](const GaussPoint&) { return 1.0; });
    CHECK(area == doctest::Approx(8 * kPi * kPi).epsilon(1e-13));
  }
  SUBCASE("3-sphere volume 2 pi^2") {
    const auto s = corpus::build("sphere3");
    const std::vector<int> res{12, 16, 16};
    const double vol = integrate_function(s.surface, quadrature(s.surface, res), [](const GaussPoint&) { return 1.0; });
    CHECK(vol == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
  }
  SUBCASE("ellipse perimeter against composite Simpson on the arclength integrand") {
    const double a = 2.0, b = 1.0;
    const int n = 20000;
    double simpson = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = 2 * kPi * k / n;
      const double f = std::hypot(a * std::sin(t), b * std::cos(t));
      simpson += f * (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    simpson *= 2 * kPi / n / 3.0;
    const auto s = corpus::build("ellipse");
    const std::vector<int> res{256};
    const double len = integrate_function(s.surface, quadrature(s.surface, res), [](const GaussPoint&) { return 1.0; });
    CHECK(len == doctest::Approx(simpson).epsilon(1e-12));
  }
}

TEST_CASE("implicit sphere: projected quadrature area and outward normal") {
  auto level = ImplicitSurface::make(
      3, [](const auto& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0; }, Vec::Constant(3, -1.5),
      Vec::Constant(3, 1.5));
  Hypersurface h;
  h.name = "implicit_sphere";
  h.ambient_dim = 3;
  h.representation = Representation::implicit;
  h.level_set = level;
  const std::vector<int> res{48};
  const auto rule = quadrature(h, res);
  const double area = integrate_function(h, rule, [](const GaussPoint&) { return 1.0; });
  CHECK(area == doctest::Approx(4 * kPi).epsilon(2e-3));
  Vec x(3);
  x << 0.3, -0.4, 0.5;
  const Vec on = level.project(x);
  CHECK(std::abs(on.norm() - 1.0) < 1e-12);
  const auto p = implicit_gauss_point(level, on);
  CHECK((p.normal - on).norm() < 1e-12);
  CHECK((p.shape - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate and invalid inputs") {
  const auto s = corpus::build("sphere");
  CHECK_THROWS_AS(gauss_map(s.surface, Param{0.0, 0.3, 0.0, 0.0}), DegeneratePointError);
  const std::vector<int> wrong{16};
  CHECK_THROWS_AS(quadrature(s.surface, wrong), InputError);
  Hypersurface empty;
  empty.name = "empty";
  CHECK_THROWS_AS(empty.require_chart(), InputError);
}
