#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> yields exact mixed
// second derivatives, one more level gives third derivatives.

#include <cmath>

namespace hopf {

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT(google-explicit-constructor)
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T inv = T(1.0) / b.v;
    return Dual(a.v * inv, (a.d * b.v - a.v * b.d) * inv * inv);
  }
  friend Dual operator-(const Dual& a) { return Dual(-a.v, -a.d); }

  friend Dual operator+(Dual a, double b) { a.v += b; return a; }
  friend Dual operator+(double b, Dual a) { a.v += b; return a; }
  friend Dual operator-(Dual a, double b) { a.v -= b; return a; }
  friend Dual operator-(double b, const Dual& a) { return Dual(b - a.v, -a.d); }
  friend Dual operator*(Dual a, double b) { a.v *= b; a.d *= b; return a; }
  friend Dual operator*(double b, Dual a) { a.v *= b; a.d *= b; return a; }
  friend Dual operator/(Dual a, double b) { a.v /= b; a.d /= b; return a; }
  friend Dual operator/(double b, const Dual& a) { return Dual(b) / a; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
};

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return Dual<T>(sin(a.v), a.d * cos(a.v));
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return Dual<T>(cos(a.v), -(a.d * sin(a.v)));
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return Dual<T>(s, a.d / (2.0 * s));
}

template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  T r2 = x.v * x.v + y.v * y.v;
  return Dual<T>(atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2);
}

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;
using Dual3 = Dual<Dual2>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

}  // namespace hopf
