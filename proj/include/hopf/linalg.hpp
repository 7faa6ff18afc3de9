#pragma once

#include <array>

#include <Eigen/Dense>

namespace hopf {

inline constexpr int kMaxAmbient = 4;

/// Small vectors/matrices (dimension <= 4) without heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

/// Chart parameter or ambient point; only the leading entries are used.
using Param = std::array<double, 4>;

template <class T>
using Point = std::array<T, kMaxAmbient>;

/// Vector n with n_j = det[e_j, v_1, ..., v_{n-1}] for the n-1 columns of
/// `cols`, so that det[n, v_1, ..., v_{n-1}] = |n|^2 > 0.
Vec cofactor_normal(const Mat& cols);

/// Orthonormal basis (n x n-1) of the complement of unit vector v, oriented so
/// that det[v, B] = +1.
Mat complement_basis(const Vec& v);

/// Gram-Schmidt on the columns of `cols`. Returns Q (same shape, orthonormal
/// columns spanning the same flag) and fills `coeffs` with the upper
/// triangular E such that Q = cols * E.
Mat gram_schmidt(const Mat& cols, Mat* coeffs = nullptr);

inline Vec to_vec(const Param& p, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = p[i];
  return v;
}

inline Param to_param(const Vec& v) {
  Param p{};
  for (int i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

}  // namespace hopf
