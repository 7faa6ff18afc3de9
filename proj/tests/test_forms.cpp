#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "hopf/error.hpp"
#include "hopf/forms.hpp"

using namespace hopf::forms;

namespace {

const CoordFrame kUVW = CoordFrame::coordinates(3);
const CoordFrame kTUV = CoordFrame::coordinates(2, true);

DifferentialForm random_form(std::mt19937_64& rng, const CoordFrame& frame, int grade) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DifferentialForm f(frame, grade);
  for (unsigned m = 0; m < (1u << frame.dim()); ++m) {
    if (monomial_grade(static_cast<Monomial>(m)) == grade) f.add(static_cast<Monomial>(m), TPoly{dist(rng), dist(rng)});
  }
  return f;
}

double max_diff(const DifferentialForm& a, const DifferentialForm& b) { return (a - b).max_abs(); }

// Oracle: 1/(2^m m!) * sum over all permutations, no matching shortcut.
double pfaffian_by_permutations(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (n % 2) return 0.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double sum = 0.0;
  do {
    double prod = permutation_sign(perm);
    for (int k = 0; k < n / 2; ++k) prod *= a(perm[2 * k], perm[2 * k + 1]);
    sum += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  double norm = 1.0;
  for (int k = 1; k <= n / 2; ++k) norm *= 2.0 * k;
  return sum / norm;
}

FormMatrix scalar_matrix(const Eigen::MatrixXd& a) {
  const CoordFrame frame = CoordFrame::coordinates(1);
  FormMatrix m(static_cast<int>(a.rows()), frame, 0);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i + 1; j < a.rows(); ++j) m.set(i, j, DifferentialForm::scalar(frame, a(i, j)));
  }
  return m;
}

Eigen::MatrixXd random_antisymmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = dist(rng);
      a(j, i) = -a(i, j);
    }
  }
  return a;
}

double scalar_value(const DifferentialForm& f) { return f.coefficient(Monomial{0})[0]; }

}  // namespace

TEST_CASE("permutation parity") {
  CHECK(permutation_sign(std::vector<int>{}) == 1);
  CHECK(permutation_sign(std::vector<int>{0, 1, 2}) == 1);
  CHECK(permutation_sign(std::vector<int>{1, 0, 2}) == -1);
  CHECK(permutation_sign(std::vector<int>{2, 0, 1}) == 1);
  CHECK(permutation_sign(std::vector<int>{0, 2, 1, 3}) == -1);
  CHECK(permutation_sign(std::vector<int>{3, 2, 1, 0}) == 1);
  CHECK(permutation_sign(std::vector<int>{1, 1}) == 0);
}

TEST_CASE("coordinate frames") {
  CHECK(kTUV.has_t());
  CHECK(kTUV.dim() == 3);
  CHECK(kTUV.without_t() == CoordFrame::coordinates(2));
  CHECK_THROWS_AS(CoordFrame({"a", "a"}), hopf::InputError);
  CHECK_THROWS_AS(CoordFrame({"u", "t"}), hopf::InputError);
  CHECK_THROWS_AS(CoordFrame::coordinates(6), hopf::InputError);
}

TEST_CASE("TPoly arithmetic and exact integral") {
  const TPoly p = TPoly::one_minus_t() * TPoly::one_minus_t();
  CHECK(p.degree() == 2);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);
  CHECK(p[2] == 1.0);
  CHECK(TPoly(1.0).integral01() == 1.0);
  CHECK(TPoly{0.0, 1.0}.integral01() == 0.5);
  // Oracle: composite Simpson on (1 - t)^2 (exact for cubics).
  double simpson = 0.0;
  const int n = 10;
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    simpson += w * p(t);
  }
  simpson /= 3.0 * n;
  CHECK(p.integral01() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(simpson == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK((TPoly{1.0, 2.0} - TPoly{1.0, 2.0}).is_zero());
  CHECK(TPoly{3.0, 0.0, 0.0}.degree() == 0);
}

TEST_CASE("wedge basis cases") {
  const auto du1 = DifferentialForm::basis(kUVW, {0});
  const auto du2 = DifferentialForm::basis(kUVW, {1});
  const auto du3 = DifferentialForm::basis(kUVW, {2});
  const auto w12 = wedge(du1, du2);
  CHECK(w12.grade() == 2);
  CHECK(w12.coefficient({0, 1})[0] == 1.0);
  CHECK(wedge(du2, du1).coefficient({0, 1})[0] == -1.0);
  CHECK(wedge(w12, wedge(du1, du3)).is_zero());
  CHECK(DifferentialForm::basis(kUVW, {2, 0}).coefficient({0, 2})[0] == -1.0);
  CHECK_THROWS_AS(wedge(du1, DifferentialForm::basis(kTUV, {1})), hopf::InputError);
}

TEST_CASE("wedge is associative and graded-anticommutative on random forms") {
  std::mt19937_64 rng(11);
  const CoordFrame frame = CoordFrame::coordinates(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = trial % 3;
    const int q = (trial / 3) % 3;
    const int r = (trial / 9) % 2;
    const auto a = random_form(rng, frame, p);
    const auto b = random_form(rng, frame, q);
    const auto c = random_form(rng, frame, r);
    const double sign = ((p * q) % 2) ? -1.0 : 1.0;
    CHECK(max_diff(wedge(a, b), wedge(b, a) * TPoly(sign)) <= 1e-12);
    CHECK(max_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) <= 1e-12);
  }
}

TEST_CASE("pfaffian small cases") {
  const auto alpha = wedge(DifferentialForm::basis(kUVW, {0}), DifferentialForm::basis(kUVW, {1}));
  FormMatrix two(2, kUVW, 2);
  two.set(0, 1, alpha);
  CHECK(max_diff(pfaffian(two), alpha) == 0.0);

  FormMatrix three(3, kUVW, 2);
  three.set(0, 1, alpha);
  three.set(0, 2, alpha * TPoly(2.0));
  three.set(1, 2, alpha * TPoly(-1.0));
  CHECK(pfaffian(three).is_zero());
}

TEST_CASE("pfaffian 4x4 expansion matches permutation sum") {
  std::mt19937_64 rng(5);
  const CoordFrame frame = CoordFrame::coordinates(4);
  std::vector<std::vector<DifferentialForm>> e(4, std::vector<DifferentialForm>(4, DifferentialForm(frame, 2)));
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      e[i][j] = random_form(rng, frame, 2);
      e[j][i] = -e[i][j];
    }
  }
  const auto m = FormMatrix::from_entries(e);
  const auto expected = wedge(e[0][1], e[2][3]) - wedge(e[0][2], e[1][3]) + wedge(e[0][3], e[1][2]);
  CHECK(max_diff(pfaffian(m), expected) <= 1e-12);

  // Scalar version against the full permutation oracle.
  const Eigen::MatrixXd a = random_antisymmetric(rng, 4);
  CHECK(scalar_value(pfaffian(scalar_matrix(a))) == doctest::Approx(pfaffian_by_permutations(a)).epsilon(1e-12));
  const Eigen::MatrixXd b = random_antisymmetric(rng, 6);
  CHECK(scalar_value(pfaffian(scalar_matrix(b))) == doctest::Approx(pfaffian_by_permutations(b)).epsilon(1e-12));
}

TEST_CASE("pfaffian squared equals determinant; orthogonal covariance") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 * (1 + trial % 4);
    const Eigen::MatrixXd a = random_antisymmetric(rng, n);
    const double pf = scalar_value(pfaffian(scalar_matrix(a)));
    CHECK(std::abs(pf * pf - a.determinant()) <= 1e-10 * std::max(1.0, std::abs(a.determinant())));

    Eigen::MatrixXd g(n, n);
    std::normal_distribution<double> dist;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = dist(rng);
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const Eigen::MatrixXd rotated = q.transpose() * a * q;
    const double pf_rot = scalar_value(pfaffian(scalar_matrix(rotated)));
    CHECK(std::abs(pf_rot - q.determinant() * pf) <= 1e-10 * std::max(1.0, std::abs(pf)));
  }
}

TEST_CASE("pfaffian input validation") {
  const CoordFrame frame = CoordFrame::coordinates(2);
  std::vector<std::vector<DifferentialForm>> e(2, std::vector<DifferentialForm>(2, DifferentialForm(frame, 0)));
  e[0][1] = DifferentialForm::scalar(frame, 1.0);
  e[1][0] = DifferentialForm::scalar(frame, 1.0);
  CHECK_THROWS_AS(FormMatrix::from_entries(e), hopf::InputError);
  FormMatrix odd(2, frame, 1);
  odd.set(0, 1, DifferentialForm::basis(frame, {0}));
  CHECK_THROWS_AS(pfaffian(odd), hopf::InputError);
}

TEST_CASE("interior_dt and integrate_t") {
  const auto dt_du1 = DifferentialForm::basis(kTUV, {0, 1});
  CHECK(max_diff(interior_dt(dt_du1), DifferentialForm::basis(kTUV, {1})) == 0.0);
  CHECK(interior_dt(DifferentialForm::basis(kTUV, {1, 2})).is_zero());

  const CoordFrame tuvw = CoordFrame::coordinates(3, true);
  const TPoly t2{0.0, 0.0, 1.0};
  const auto f = DifferentialForm::basis(tuvw, {0, 1, 2}, t2);
  CHECK(interior_dt(f).coefficient({1, 2}) == t2);

  const auto g = DifferentialForm::basis(kTUV, {1}, TPoly::one_minus_t() * TPoly::one_minus_t());
  const auto gi = integrate_t(g);
  CHECK(gi.frame() == CoordFrame::coordinates(2));
  CHECK(gi.coefficient({0})[0] == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(integrate_t(dt_du1), hopf::InputError);
  CHECK_THROWS_AS(interior_dt(DifferentialForm::basis(kUVW, {0})), hopf::InputError);
}

TEST_CASE("fibre integration of dt ^ beta returns beta") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const CoordFrame frame = CoordFrame::coordinates(3, true);
  DifferentialForm beta(frame, 2);
  beta.add(monomial(std::vector<int>{1, 2}), dist(rng));
  beta.add(monomial(std::vector<int>{1, 3}), dist(rng));
  beta.add(monomial(std::vector<int>{2, 3}), dist(rng));
  const auto result = integrate_t(interior_dt(wedge(DifferentialForm::basis(frame, {0}), beta)));
  for (const auto& term : beta.terms()) {
    CHECK(result.coefficient(static_cast<Monomial>(term.basis >> 1)) == term.coeff);
  }
}

TEST_CASE("pullback along a linear map") {
  const CoordFrame xy = CoordFrame::coordinates(2, false, "x");
  const CoordFrame uv = CoordFrame::coordinates(2);
  const double angle = 0.3;
  const std::vector<double> jac{2.0 * std::cos(angle), -std::sin(angle), 2.0 * std::sin(angle), std::cos(angle)};
  const auto area = pullback(DifferentialForm::basis(xy, {0, 1}), uv, jac);
  CHECK(area.coefficient({0, 1})[0] == doctest::Approx(2.0));
  const auto dx = pullback(DifferentialForm::basis(xy, {0}), uv, jac);
  CHECK(dx.coefficient({0})[0] == doctest::Approx(jac[0]));
  CHECK(dx.coefficient({1})[0] == doctest::Approx(jac[1]));
}
