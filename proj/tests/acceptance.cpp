// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopf/connection.hpp"
#include "hopf/corpus.hpp"
#include "hopf/degree.hpp"
#include "hopf/euler.hpp"
#include "hopf/forms.hpp"
#include "hopf/mesh.hpp"
#include "hopf/parallel.hpp"
#include "hopf/report.hpp"
#include "hopf/transgression.hpp"

using namespace hopf;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<int> res(std::initializer_list<int> r) { return r; }

void c1(Outcome& o) {
  const auto s = corpus::build("sphere");
  const auto d = degree::degree_pfaffian(s.surface, res({64, 128}));
  const double integral = 2.0 * d.value;
  o.detail << "integral of the Euler form over S^2 = " << report::format_number(integral);
  o.require(std::abs(integral - 2.0) <= 1e-6, "|integral - 2| <= 1e-6");
}

void c2(Outcome& o) {
  const auto s = corpus::build("circle");
  const auto e = transgression::integrate_tpf(s.surface, res({256}));
  o.detail << "integral of TPf over S^1 = " << report::format_number(e.value);
  o.require(std::abs(e.value + 1.0) <= 1e-10, "|integral + 1| <= 1e-10");
}

void c3(Outcome& o) {
  const auto s = corpus::build("sphere3");
  const auto e = transgression::integrate_tpf(s.surface, res({24, 48, 48}));
  o.detail << "integral of TPf over S^3 = " << report::format_number(e.value);
  o.require(std::abs(e.value + 1.0) <= 1e-3, "|integral + 1| <= 1e-3");
}

void check_estimate(Outcome& o, const std::string& shape, const degree::DegreeEstimate& e, int expected) {
  o.detail << " " << shape << "/" << e.estimator << "=" << fmt(e.value);
  o.require(e.rounded == expected && e.rounding_gap() < 0.1, shape + " " + e.estimator);
}

void c4(Outcome& o) {
  for (const char* name : {"sphere", "ellipsoid", "torus"}) {
    const auto s = corpus::build(name);
    const int expected = s.record.chi_h->value / 2;
    check_estimate(o, name, degree::degree_pfaffian(s.surface), expected);
    check_estimate(o, name, degree::degree_gk(s.surface), expected);
    check_estimate(o, name, degree::degree_preimage(s.surface, 1), expected);
  }
  const auto g = corpus::build("genus2_mesh");
  check_estimate(o, "genus2_mesh", degree::degree_mesh(*g.surface.mesh), euler::chi_mesh(*g.surface.mesh) / 2);
}

void c5(Outcome& o) {
  for (const char* name : {"circle", "ellipse", "bumpy_circle", "sphere3", "ellipsoid4", "tube_s1xs2"}) {
    const auto s = corpus::build(name);
    const auto solid = euler::chi_solid(s, 1);
    o.require(solid.morse && *solid.morse == solid.annotated, std::string(name) + " chi(W) oracle");
    const auto hopf = transgression::hopf_even_degree(s.surface);
    const auto pre = degree::degree_preimage(s.surface, 1);
    check_estimate(o, name, hopf, solid.annotated);
    check_estimate(o, name, pre, solid.annotated);
    o.require(hopf.rounded == pre.rounded, std::string(name) + " estimators agree");
  }
}

// Worst residual; with `conditioned`, each residual is divided by eps * cond(g),
// the rounding floor of the chart (polar charts degenerate near their poles).
double lemma1_max(const corpus::Shape& s, int points, std::uint64_t seed, bool conditioned = false) {
  const auto& chart = *s.surface.chart;
  const int m = chart.param_dim();
  const auto params = transgression::sample_parameters(chart, points, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> normal;
  std::vector<connection::SphereField> family;
  for (int f = 0; f < 3; ++f) family.push_back(connection::SphereField::member(s.surface.ambient_dim, 1000 + f));
  double worst = 0.0;
  for (const auto& u : params) {
    std::array<double, 3> y{normal(rng), normal(rng), normal(rng)};
    double floor = 1.0;
    if (conditioned) {
      const Eigen::SelfAdjointEigenSolver<Mat> eig(surfaces::gauss_map(s.surface, u).metric);
      floor = std::numeric_limits<double>::epsilon() * eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    }
    for (const auto& field : family) {
      worst = std::max(worst,
                       connection::lemma1_residual(s.surface, u, field, std::span<const double>(y.data(), m)) / floor);
    }
  }
  return worst;
}

void c6(Outcome& o) {
  for (const char* name : {"sphere", "ellipsoid", "torus"}) {
    const double w = lemma1_max(corpus::build(name), 1000, 11);
    o.detail << " " << name << "=" << fmt(w);
    o.require(w <= 1e-6, std::string(name) + " <= 1e-6");
    if (std::string(name) == "sphere") {
      const double ulps = lemma1_max(corpus::build(name), 1000, 11, true);
      o.detail << " (" << fmt(ulps) << " eps*cond(g))";
      o.require(ulps <= 16.0, "unit sphere at machine precision (<= 16 eps*cond(g))");
    }
  }
}

void c7(Outcome& o) {
  for (const char* name : {"circle", "ellipse", "bumpy_circle", "sphere3", "ellipsoid4", "tube_s1xs2"}) {
    const auto r = transgression::closedness_residual(corpus::build(name).surface, 24, 3);
    o.detail << " " << name << "=" << fmt(r.max_residual);
    o.require(r.max_residual <= 1e-4, std::string(name) + " <= 1e-4");
  }
}

void c8(Outcome& o) {
  for (const char* name : {"ellipse", "ellipsoid4"}) {
    const auto s = corpus::build(name);
    double worst = 0.0;
    for (const auto& u : transgression::sample_parameters(*s.surface.chart, 200, 5)) {
      worst = std::max(worst, transgression::naturality_residual(s.surface, u));
    }
    o.detail << " " << name << "=" << fmt(worst);
    o.require(worst <= 1e-6, std::string(name) + " <= 1e-6");
  }
}

double pf_scalar(const Eigen::MatrixXd& a) {
  const auto frame = forms::CoordFrame::coordinates(1);
  forms::FormMatrix m(static_cast<int>(a.rows()), frame, 0);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i + 1; j < a.rows(); ++j) m.set(i, j, forms::DifferentialForm::scalar(frame, a(i, j)));
  }
  return forms::pfaffian(m).coefficient(forms::Monomial{0})[0];
}

double max_jet_gap(const surfaces::Jet& a, const surfaces::Jet& b) {
  double gap = (a.position - b.position).cwiseAbs().maxCoeff();
  gap = std::max(gap, (a.first - b.first).cwiseAbs().maxCoeff());
  for (int i = 0; i < a.m; ++i) {
    for (int j = 0; j < a.m; ++j) gap = std::max(gap, (a.second[i][j] - b.second[i][j]).cwiseAbs().maxCoeff());
  }
  return gap;
}

void c9(Outcome& o) {
  {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    double worst_det = 0.0, worst_cov = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 * (1 + trial % 4);
      Eigen::MatrixXd g(n, n), a(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
      }
      a = g - g.transpose();
      const double pf = pf_scalar(a);
      const double scale = std::max(1.0, std::abs(a.determinant()));
      worst_det = std::max(worst_det, std::abs(pf * pf - a.determinant()) / scale);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
      }
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
      const double rotated = pf_scalar(q * a * q.transpose());
      worst_cov = std::max(worst_cov, std::abs(rotated - q.determinant() * pf) / std::max(1.0, std::abs(pf)));
    }
    o.detail << " pf2-det=" << fmt(worst_det) << " covariance=" << fmt(worst_cov);
    o.require(worst_det <= 1e-10 && worst_cov <= 1e-10, "Pfaffian identities");
  }
  {
    const auto dual = surfaces::DiffBackend::parse("dual");
    const auto fd = surfaces::DiffBackend::parse("fd");
    const std::vector<std::string> shapes{"circle", "ellipse", "bumpy_circle", "sphere", "ellipsoid",
                                          "torus", "sphere3", "ellipsoid4", "tube_s1xs2"};
    double worst_dual = 0.0, worst_fd = 0.0;
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      const auto s = corpus::build(shapes[k]);
      const auto& chart = *s.surface.chart;
      for (const auto& u : transgression::sample_parameters(chart, 1000, 100 + k)) {
        const auto a = chart.jet(u, {});
        worst_dual = std::max(worst_dual, max_jet_gap(a, chart.jet(u, dual)));
        worst_fd = std::max(worst_fd, max_jet_gap(a, chart.jet(u, fd)));
      }
    }
    o.detail << " dual=" << fmt(worst_dual) << " fd=" << fmt(worst_fd);
    o.require(worst_dual <= 1e-9 && worst_fd <= 1e-5, "backend agreement");
  }
  {
    bool ok = true;
    for (const char* name : {"circle", "bumpy_circle", "sphere", "ellipsoid", "torus", "genus2", "sphere3", "ellipsoid4",
                             "tube_s1xs2"}) {
      const auto s = corpus::build(name);
      const degree::PreimageFinder finder(s.surface);
      for (std::uint64_t seed = 0; seed < 32; ++seed) {
        ok &= degree::degree_preimage(finder, s.surface.ambient_dim, seed).value == s.record.expected_degree.value;
      }
    }
    o.detail << " seeds=" << (ok ? "stable" : "unstable");
    o.require(ok, "32-seed independence");
  }
  {
    double worst = 0.0;
    std::vector<surfaces::TriMesh> meshes;
    for (const char* name : {"genus2_mesh", "icosphere", "tetrahedron", "torus_mesh"}) {
      meshes.push_back(*corpus::build(name).surface.mesh);
    }
    for (const auto& m : meshes) {
      double sum = 0.0;
      for (double d : m.angle_defects) sum += d;
      worst = std::max(worst, std::abs(sum - 2 * std::numbers::pi * euler::chi_mesh(m)));
    }
    o.detail << " defects=" << fmt(worst);
    o.require(worst <= 1e-9, "angle defects");
  }
  {
    bool ok = true;
    for (const char* name : {"sphere", "ellipsoid", "torus", "genus2"}) {
      const auto s = corpus::build(name);
      const degree::PreimageFinder finder(s.surface);
      std::mt19937_64 rng(16);
      for (int k = 0; k < 16; ++k) {
        ok &= euler::chi_morse(finder, s.surface, degree::random_direction(3, rng), k).chi == s.record.chi_h->value;
      }
    }
    for (const char* name : {"circle", "ellipse", "bumpy_circle", "sphere3", "ellipsoid4", "tube_s1xs2"}) {
      const auto s = corpus::build(name);
      const degree::PreimageFinder finder(s.surface);
      std::mt19937_64 rng(17);
      for (int k = 0; k < 16; ++k) {
        ok &= euler::chi_morse(finder, s.surface, degree::random_direction(s.surface.ambient_dim, rng), k).chi == 0;
      }
    }
    o.detail << " morse=" << (ok ? "stable" : "unstable");
    o.require(ok, "Morse counts");
  }
}

void c10(Outcome& o) {
  const report::VerifyOptions opts;
  const auto corpus = corpus::default_corpus();
  parallel::set_thread_count(1);
  const auto a = report::to_json(report::verify_all(corpus, opts));
  parallel::set_thread_count(4);
  const auto b = report::to_json(report::verify_all(corpus, opts));
  parallel::set_thread_count(1);
  o.detail << " " << a.size() << " bytes, threads 1 vs 4";
  o.require(a == b, "byte-identical reports");
  o.require(report::verify_all(corpus, opts).pass(), "default corpus verifies");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 Euler-form calibration on S^2", c1},
      {"2 TPf integral on S^1", c2},
      {"3 TPf integral on S^3", c3},
      {"4 odd-n estimators equal chi(H)/2", c4},
      {"5 even-n estimators equal chi(W)", c5},
      {"6 projector connection equals Levi-Civita", c6},
      {"7 TPf closedness", c7},
      {"8 TPf naturality", c8},
      {"9 property suites", c9},
      {"10 report determinism", c10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %s:%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().empty() ? "" : " ",
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures;
}
