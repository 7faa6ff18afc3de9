#include "hopf/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>

#include "hopf/error.hpp"

namespace hopf::forms {

// ---------------------------------------------------------------------------
// CoordFrame

CoordFrame::CoordFrame(std::span<const std::string_view> labels) {
  for (auto l : labels) push(l);
}

CoordFrame::CoordFrame(std::initializer_list<std::string_view> labels) {
  for (auto l : labels) push(l);
}

void CoordFrame::push(std::string_view label) {
  if (dim_ >= kMaxFrameDim) throw InputError("coordinate frame dimension exceeds 5");
  if (label.empty() || label.size() >= 8) throw InputError("coordinate label must have 1..7 characters");
  for (int i = 0; i < dim_; ++i) {
    if (this->label(i) == label) throw InputError("duplicate coordinate label '" + std::string(label) + "'");
  }
  if (label == "t" && dim_ != 0) throw InputError("path coordinate t must be the first label");
  std::memcpy(labels_[dim_].data(), label.data(), label.size());
  ++dim_;
}

CoordFrame CoordFrame::coordinates(int dim, bool with_t, std::string_view prefix) {
  CoordFrame f;
  if (with_t) f.push("t");
  for (int i = 1; i <= dim; ++i) f.push(std::string(prefix) + std::to_string(i));
  return f;
}

std::string_view CoordFrame::label(int i) const { return std::string_view(labels_[i].data()); }

std::vector<std::string> CoordFrame::labels() const {
  std::vector<std::string> out;
  for (int i = 0; i < dim_; ++i) out.emplace_back(label(i));
  return out;
}

CoordFrame CoordFrame::with_t() const {
  if (has_t()) return *this;
  CoordFrame f;
  f.push("t");
  for (int i = 0; i < dim_; ++i) f.push(label(i));
  return f;
}

CoordFrame CoordFrame::without_t() const {
  if (!has_t()) return *this;
  CoordFrame f;
  for (int i = 1; i < dim_; ++i) f.push(label(i));
  return f;
}

bool CoordFrame::operator==(const CoordFrame& other) const {
  return dim_ == other.dim_ && labels_ == other.labels_;
}

// ---------------------------------------------------------------------------
// TPoly

TPoly::TPoly(double constant) {
  c_[0] = constant;
  size_ = 1;
  trim();
}

TPoly::TPoly(std::initializer_list<double> coefficients) {
  if (coefficients.size() > c_.size()) throw InputError("TPoly degree exceeds limit");
  std::copy(coefficients.begin(), coefficients.end(), c_.begin());
  size_ = static_cast<int>(coefficients.size());
  trim();
}

void TPoly::trim() {
  while (size_ > 0 && c_[size_ - 1] == 0.0) --size_;
}

double TPoly::operator()(double t) const {
  double acc = 0.0;
  for (int k = size_ - 1; k >= 0; --k) acc = acc * t + c_[k];
  return acc;
}

double TPoly::integral01() const {
  double acc = 0.0;
  for (int k = 0; k < size_; ++k) acc += c_[k] / (k + 1);
  return acc;
}

double TPoly::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < size_; ++k) m = std::max(m, std::abs(c_[k]));
  return m;
}

TPoly& TPoly::operator+=(const TPoly& o) {
  size_ = std::max(size_, o.size_);
  for (int k = 0; k < o.size_; ++k) c_[k] += o.c_[k];
  trim();
  return *this;
}

TPoly& TPoly::operator-=(const TPoly& o) {
  size_ = std::max(size_, o.size_);
  for (int k = 0; k < o.size_; ++k) c_[k] -= o.c_[k];
  trim();
  return *this;
}

TPoly& TPoly::operator*=(double s) {
  for (int k = 0; k < size_; ++k) c_[k] *= s;
  trim();
  return *this;
}

TPoly operator*(const TPoly& a, const TPoly& b) {
  TPoly r;
  if (a.is_zero() || b.is_zero()) return r;
  const int size = a.size_ + b.size_ - 1;
  if (size > static_cast<int>(r.c_.size())) throw InputError("TPoly product exceeds maximum t-degree");
  for (int i = 0; i < a.size_; ++i) {
    for (int j = 0; j < b.size_; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  }
  r.size_ = size;
  r.trim();
  return r;
}

bool TPoly::operator==(const TPoly& o) const {
  if (size_ != o.size_) return false;
  return std::equal(c_.begin(), c_.begin() + size_, o.c_.begin());
}

// ---------------------------------------------------------------------------
// Signs and monomials

int permutation_sign(std::span<const int> indices) {
  int inversions = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      if (indices[i] == indices[j]) return 0;
      if (indices[i] > indices[j]) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

Monomial monomial(std::span<const int> increasing_indices) {
  Monomial m = 0;
  int prev = -1;
  for (int i : increasing_indices) {
    if (i <= prev || i >= kMaxFrameDim) throw InputError("monomial indices must be strictly increasing and < 5");
    m |= static_cast<Monomial>(1u << i);
    prev = i;
  }
  return m;
}

std::vector<int> monomial_indices(Monomial m) {
  std::vector<int> out;
  for (int i = 0; i < kMaxFrameDim; ++i) {
    if (m & (1u << i)) out.push_back(i);
  }
  return out;
}

int monomial_grade(Monomial m) { return std::popcount(static_cast<unsigned>(m)); }

namespace {

// Sign of du_A ^ du_B relative to du_{A u B}; 0 if A and B overlap.
int wedge_sign(Monomial a, Monomial b) {
  if (a & b) return 0;
  std::array<int, 2 * kMaxFrameDim> seq{};
  int len = 0;
  for (int i = 0; i < kMaxFrameDim; ++i) {
    if (a & (1u << i)) seq[len++] = i;
  }
  for (int i = 0; i < kMaxFrameDim; ++i) {
    if (b & (1u << i)) seq[len++] = i;
  }
  return permutation_sign(std::span<const int>(seq.data(), len));
}

void require_same_frame(const DifferentialForm& a, const DifferentialForm& b) {
  if (!(a.frame() == b.frame())) throw InputError("differential forms live in different coordinate frames");
}

}  // namespace

// ---------------------------------------------------------------------------
// DifferentialForm

DifferentialForm::DifferentialForm(CoordFrame frame, int grade) : frame_(frame), grade_(grade) {
  if (grade < 0 || grade > frame_.dim()) throw InputError("form grade out of range for frame");
}

DifferentialForm DifferentialForm::scalar(const CoordFrame& frame, const TPoly& value) {
  DifferentialForm f(frame, 0);
  f.add(0, value);
  return f;
}

DifferentialForm DifferentialForm::basis(const CoordFrame& frame, std::initializer_list<int> indices,
                                         const TPoly& coeff) {
  return basis(frame, std::span<const int>(indices.begin(), indices.size()), coeff);
}

DifferentialForm DifferentialForm::basis(const CoordFrame& frame, std::span<const int> indices,
                                         const TPoly& coeff) {
  const int grade = static_cast<int>(indices.size());
  DifferentialForm f(frame, std::min(grade, frame.dim()));
  if (grade > frame.dim()) return f;
  for (int i : indices) {
    if (i < 0 || i >= frame.dim()) throw InputError("basis index outside frame");
  }
  const int sign = permutation_sign(indices);
  if (sign == 0) return DifferentialForm(frame, grade);
  std::vector<int> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  f.grade_ = grade;
  f.add(monomial(sorted), coeff * static_cast<double>(sign));
  return f;
}

TPoly DifferentialForm::coefficient(Monomial m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Monomial key) { return t.basis < key; });
  if (it != terms_.end() && it->basis == m) return it->coeff;
  return {};
}

TPoly DifferentialForm::coefficient(std::span<const int> increasing_indices) const {
  return coefficient(monomial(increasing_indices));
}

TPoly DifferentialForm::coefficient(std::initializer_list<int> increasing_indices) const {
  return coefficient(std::span<const int>(increasing_indices.begin(), increasing_indices.size()));
}

TPoly DifferentialForm::top_coefficient() const {
  if (grade_ != frame_.dim()) throw InputError("top_coefficient on a form that is not top-degree");
  return coefficient(static_cast<Monomial>((1u << frame_.dim()) - 1u));
}

double DifferentialForm::max_abs() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, t.coeff.max_abs());
  return m;
}

void DifferentialForm::add(Monomial m, const TPoly& coeff) {
  if (monomial_grade(m) != grade_) throw InputError("monomial grade does not match form grade");
  if (m >> frame_.dim()) throw InputError("monomial outside frame");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Monomial key) { return t.basis < key; });
  if (it != terms_.end() && it->basis == m) {
    it->coeff += coeff;
    if (it->coeff.is_zero()) terms_.erase(it);
  } else if (!coeff.is_zero()) {
    terms_.insert(it, Term{m, coeff});
  }
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& o) {
  require_same_frame(*this, o);
  if (o.is_zero()) return *this;
  if (is_zero()) {
    grade_ = o.grade_;
    terms_ = o.terms_;
    return *this;
  }
  if (grade_ != o.grade_) throw InputError("adding forms of different grade");
  for (const auto& t : o.terms_) add(t.basis, t.coeff);
  return *this;
}

DifferentialForm& DifferentialForm::operator-=(const DifferentialForm& o) { return *this += -o; }

DifferentialForm& DifferentialForm::operator*=(const TPoly& s) {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    TPoly c = t.coeff * s;
    if (!c.is_zero()) out.push_back({t.basis, c});
  }
  terms_ = std::move(out);
  return *this;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_frame(a, b);
  const int grade = a.grade() + b.grade();
  if (grade > a.frame().dim()) return DifferentialForm(a.frame(), a.frame().dim());
  DifferentialForm out(a.frame(), grade);
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      const int sign = wedge_sign(ta.basis, tb.basis);
      if (sign == 0) continue;
      out.add(ta.basis | tb.basis, (ta.coeff * tb.coeff) * static_cast<double>(sign));
    }
  }
  return out;
}

DifferentialForm interior_dt(const DifferentialForm& a) {
  if (!a.frame().has_t()) throw InputError("interior_dt requires a frame containing t");
  if (a.grade() == 0) return DifferentialForm(a.frame(), 0);
  DifferentialForm out(a.frame(), a.grade() - 1);
  for (const auto& t : a.terms()) {
    // dt is index 0, always first in an increasing tuple: no sign change.
    if (t.basis & 1u) out.add(static_cast<Monomial>(t.basis & ~1u), t.coeff);
  }
  return out;
}

DifferentialForm integrate_t(const DifferentialForm& a) {
  if (!a.frame().has_t()) throw InputError("integrate_t requires a frame containing t");
  DifferentialForm out(a.frame().without_t(), a.grade());
  for (const auto& t : a.terms()) {
    if (t.basis & 1u) throw InputError("integrate_t: form still has dt-terms (contract first)");
    out.add(static_cast<Monomial>(t.basis >> 1), TPoly(t.coeff.integral01()));
  }
  return out;
}

namespace {

double minor_det(std::span<const double> jac, int cols, const std::vector<int>& rows,
                 const std::vector<int>& sel) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  // Leibniz over k! permutations, k <= 5.
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  double det = 0.0;
  do {
    double prod = permutation_sign(perm);
    for (int i = 0; i < k; ++i) prod *= jac[rows[i] * cols + sel[perm[i]]];
    det += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

DifferentialForm pullback(const DifferentialForm& a, const CoordFrame& target,
                          std::span<const double> jacobian) {
  if (a.frame().has_t()) throw InputError("pullback expects a t-free form");
  const int rows = a.frame().dim();
  const int cols = target.dim();
  if (static_cast<int>(jacobian.size()) != rows * cols) throw InputError("pullback: Jacobian size mismatch");
  if (a.grade() > cols) return DifferentialForm(target, cols);
  DifferentialForm out(target, a.grade());
  for (unsigned m = 0; m < (1u << cols); ++m) {
    if (monomial_grade(static_cast<Monomial>(m)) != a.grade()) continue;
    const auto sel = monomial_indices(static_cast<Monomial>(m));
    TPoly acc;
    for (const auto& t : a.terms()) acc += t.coeff * minor_det(jacobian, cols, monomial_indices(t.basis), sel);
    out.add(static_cast<Monomial>(m), acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FormMatrix and Pfaffian

FormMatrix::FormMatrix(int size, const CoordFrame& frame, int grade)
    : size_(size), grade_(grade), frame_(frame),
      entries_(static_cast<std::size_t>(size * size), DifferentialForm(frame, grade)) {
  if (size < 1 || size > 8) throw InputError("FormMatrix size out of range");
}

FormMatrix FormMatrix::from_entries(const std::vector<std::vector<DifferentialForm>>& entries,
                                    double tolerance) {
  const int n = static_cast<int>(entries.size());
  if (n == 0) throw InputError("empty form matrix");
  for (const auto& row : entries) {
    if (static_cast<int>(row.size()) != n) throw InputError("form matrix is not square");
  }
  const auto& frame = entries[0][0].frame();
  int grade = -1;
  for (const auto& row : entries) {
    for (const auto& e : row) {
      if (!(e.frame() == frame)) throw InputError("form matrix entries live in different frames");
      if (!e.is_zero()) {
        if (grade >= 0 && e.grade() != grade) throw InputError("form matrix entries have different grades");
        grade = e.grade();
      }
    }
  }
  if (grade < 0) grade = entries[0][0].grade();
  FormMatrix m(n, frame, grade);
  for (int i = 0; i < n; ++i) {
    if (entries[i][i].max_abs() > tolerance) throw InputError("form matrix has a nonzero diagonal entry");
    for (int j = i + 1; j < n; ++j) {
      if ((entries[i][j] + entries[j][i]).max_abs() > tolerance) {
        throw InputError("form matrix is not antisymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      m.set(i, j, entries[i][j]);
    }
  }
  return m;
}

void FormMatrix::set(int i, int j, const DifferentialForm& value) {
  if (i == j) throw InputError("diagonal of an antisymmetric form matrix is fixed at zero");
  if (!(value.frame() == frame_)) throw InputError("entry frame does not match matrix frame");
  if (!value.is_zero() && value.grade() != grade_) throw InputError("entry grade does not match matrix grade");
  DifferentialForm v = value.is_zero() ? DifferentialForm(frame_, grade_) : value;
  entries_[i * size_ + j] = v;
  entries_[j * size_ + i] = -v;
}

namespace {

void enumerate_matchings(std::vector<int>& free, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  if (free.empty()) {
    out.push_back(current);
    return;
  }
  const int first = free.front();
  for (std::size_t k = 1; k < free.size(); ++k) {
    const int partner = free[k];
    std::vector<int> rest;
    for (std::size_t r = 1; r < free.size(); ++r) {
      if (r != k) rest.push_back(free[r]);
    }
    current.push_back(first);
    current.push_back(partner);
    enumerate_matchings(rest, current, out);
    current.resize(current.size() - 2);
  }
}

}  // namespace

const std::vector<std::vector<int>>& perfect_matchings(int size) {
  static std::once_flag once;
  static std::array<std::vector<std::vector<int>>, 9> table;
  std::call_once(once, [] {
    for (int s = 0; s <= 8; s += 2) {
      std::vector<int> free(s);
      for (int i = 0; i < s; ++i) free[i] = i;
      std::vector<int> current;
      enumerate_matchings(free, current, table[s]);
    }
  });
  if (size < 0 || size > 8) throw InputError("perfect_matchings: size out of range");
  return table[size];
}

DifferentialForm pfaffian(const FormMatrix& m) {
  if (m.grade() % 2 != 0) throw InputError("pfaffian requires entries of even grade");
  const int half = m.size() / 2;
  const int grade = std::min(m.grade() * half, m.frame().dim());
  if (m.size() % 2 != 0) return DifferentialForm(m.frame(), grade);
  DifferentialForm total(m.frame(), grade);
  for (const auto& matching : perfect_matchings(m.size())) {
    const int sign = permutation_sign(matching);
    DifferentialForm prod = m(matching[0], matching[1]);
    for (int k = 1; k < half && !prod.is_zero(); ++k) prod = wedge(prod, m(matching[2 * k], matching[2 * k + 1]));
    if (prod.is_zero()) continue;
    if (sign < 0) prod = -prod;
    total += prod;
  }
  return total;
}

}  // namespace hopf::forms
