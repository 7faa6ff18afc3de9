#pragma once

// Pointwise exterior algebra over a small coordinate frame.
//
// A DifferentialForm is a homogeneous element of the exterior algebra at one
// point. Coefficients are polynomials in an optional path coordinate t so
// that fibre integration over t in [0, 1] is exact.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hopf::forms {

inline constexpr int kMaxFrameDim = 5;
inline constexpr int kMaxTDegree = 8;

/// Ordered coordinate labels. If the path coordinate "t" is present it is
/// index 0.
class CoordFrame {
 public:
  CoordFrame() = default;
  explicit CoordFrame(std::span<const std::string_view> labels);
  CoordFrame(std::initializer_list<std::string_view> labels);

  /// u1..u_dim (or x1..x_dim with prefix "x"), optionally preceded by t.
  static CoordFrame coordinates(int dim, bool with_t = false, std::string_view prefix = "u");

  int dim() const { return dim_; }
  bool has_t() const { return dim_ > 0 && label(0) == "t"; }
  std::string_view label(int i) const;
  std::vector<std::string> labels() const;

  CoordFrame with_t() const;
  CoordFrame without_t() const;

  bool operator==(const CoordFrame& other) const;

 private:
  void push(std::string_view label);

  int dim_ = 0;
  std::array<std::array<char, 8>, kMaxFrameDim> labels_{};
};

/// Real polynomial in t with at most kMaxTDegree + 1 coefficients. Trailing
/// exact zeros are dropped, so the zero polynomial has degree -1.
class TPoly {
 public:
  TPoly() = default;
  TPoly(double constant);  // NOLINT(google-explicit-constructor)
  TPoly(std::initializer_list<double> coefficients);

  static TPoly one_minus_t() { return {1.0, -1.0}; }

  int degree() const { return size_ - 1; }
  bool is_zero() const { return size_ == 0; }
  double operator[](int k) const { return k < size_ ? c_[k] : 0.0; }
  double operator()(double t) const;

  /// Exact integral over [0, 1].
  double integral01() const;
  double max_abs() const;

  TPoly& operator+=(const TPoly& o);
  TPoly& operator-=(const TPoly& o);
  TPoly& operator*=(double s);
  friend TPoly operator+(TPoly a, const TPoly& b) { return a += b; }
  friend TPoly operator-(TPoly a, const TPoly& b) { return a -= b; }
  friend TPoly operator*(TPoly a, double s) { return a *= s; }
  friend TPoly operator*(double s, TPoly a) { return a *= s; }
  friend TPoly operator-(TPoly a) { return a *= -1.0; }
  friend TPoly operator*(const TPoly& a, const TPoly& b);

  bool operator==(const TPoly& o) const;

 private:
  void trim();

  std::array<double, kMaxTDegree + 1> c_{};
  int size_ = 0;
};

/// Parity of the permutation that sorts `indices`: +1 / -1, or 0 when an index
/// repeats. Every sign in this module goes through here.
int permutation_sign(std::span<const int> indices);

/// Basis monomial du_{i1} ^ ... ^ du_{ik} stored as a bitmask over frame indices.
using Monomial = std::uint8_t;

Monomial monomial(std::span<const int> increasing_indices);
std::vector<int> monomial_indices(Monomial m);
int monomial_grade(Monomial m);

struct Term {
  Monomial basis;
  TPoly coeff;
};

class DifferentialForm {
 public:
  DifferentialForm() = default;
  /// Zero form of the given grade.
  DifferentialForm(CoordFrame frame, int grade);

  static DifferentialForm scalar(const CoordFrame& frame, const TPoly& value);
  /// coeff * du_{i1} ^ ... ^ du_{ik}; indices in any order, sign applied.
  static DifferentialForm basis(const CoordFrame& frame, std::initializer_list<int> indices,
                                const TPoly& coeff = 1.0);
  static DifferentialForm basis(const CoordFrame& frame, std::span<const int> indices,
                                const TPoly& coeff = 1.0);

  const CoordFrame& frame() const { return frame_; }
  int grade() const { return grade_; }
  /// Sorted by monomial; no zero coefficients.
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  TPoly coefficient(std::span<const int> increasing_indices) const;
  TPoly coefficient(std::initializer_list<int> increasing_indices) const;
  TPoly coefficient(Monomial m) const;
  /// Coefficient of the top-degree monomial (requires grade == frame.dim()).
  TPoly top_coefficient() const;
  double max_abs() const;

  /// Accumulates coeff onto the given monomial (grade must match).
  void add(Monomial m, const TPoly& coeff);

  DifferentialForm& operator+=(const DifferentialForm& o);
  DifferentialForm& operator-=(const DifferentialForm& o);
  DifferentialForm& operator*=(const TPoly& s);
  friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
  friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
  friend DifferentialForm operator*(DifferentialForm a, const TPoly& s) { return a *= s; }
  friend DifferentialForm operator*(const TPoly& s, DifferentialForm a) { return a *= s; }
  friend DifferentialForm operator-(DifferentialForm a) { return a *= TPoly(-1.0); }

 private:
  CoordFrame frame_;
  int grade_ = 0;
  std::vector<Term> terms_;
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

/// Contraction with d/dt (t must be frame index 0). Keeps dt-terms, strips dt.
DifferentialForm interior_dt(const DifferentialForm& a);

/// Replaces every coefficient by its integral over t in [0, 1]. The result
/// lives in the frame without t. Throws InputError if dt-terms remain.
DifferentialForm integrate_t(const DifferentialForm& a);

/// Pull-back of a t-free form along a linear map with Jacobian `jacobian`
/// (row-major, rows = a.frame().dim(), cols = target.dim()).
DifferentialForm pullback(const DifferentialForm& a, const CoordFrame& target,
                          std::span<const double> jacobian);

/// Antisymmetric matrix whose entries are forms of a common frame and grade.
class FormMatrix {
 public:
  FormMatrix() = default;
  FormMatrix(int size, const CoordFrame& frame, int grade);

  /// Validates antisymmetry (entries[i][j] == -entries[j][i] to `tolerance`).
  static FormMatrix from_entries(const std::vector<std::vector<DifferentialForm>>& entries,
                                 double tolerance = 0.0);

  int size() const { return size_; }
  int grade() const { return grade_; }
  const CoordFrame& frame() const { return frame_; }

  const DifferentialForm& operator()(int i, int j) const { return entries_[i * size_ + j]; }
  /// Sets entry (i, j) and its mirror (j, i) = -value.
  void set(int i, int j, const DifferentialForm& value);

 private:
  int size_ = 0;
  int grade_ = 0;
  CoordFrame frame_;
  std::vector<DifferentialForm> entries_;
};

/// Pf(M) = 1/(2^m m!) sum_s sgn(s) M[s1][s2] ^ ... ^ M[s(2m-1)][s(2m)],
/// evaluated as a sum over perfect matchings. Odd sizes give the zero form of
/// grade grade * (size / 2). Entries must have even grade.
DifferentialForm pfaffian(const FormMatrix& m);

/// Perfect matchings of {0, ..., size-1} as flat pair lists (i1, j1, i2, j2, ...)
/// with i_k < j_k and i_1 < i_2 < ....
const std::vector<std::vector<int>>& perfect_matchings(int size);

}  // namespace hopf::forms
