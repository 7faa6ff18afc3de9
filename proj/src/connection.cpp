#include "hopf/connection.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hopf/error.hpp"

namespace hopf::conventions {

double pfaffian_normalization(int rank) { return std::pow(2.0 * std::numbers::pi, -0.5 * rank); }

}  // namespace hopf::conventions

namespace hopf::connection {

namespace {

using forms::CoordFrame;
using forms::DifferentialForm;
using forms::FormMatrix;

// Jet entries over a scalar type; T = Dual1 carries one directional derivative.
template <class T>
struct JetT {
  int n = 0;
  int m = 0;
  std::array<std::array<T, 3>, 4> first{};                // first[c][i]
  std::array<std::array<std::array<T, 4>, 3>, 3> second{};  // second[i][j][c]
};

template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

template <class T>
T determinant(const Mat3<T>& a, int m) {
  if (m == 1) return a[0][0];
  if (m == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

template <class T>
Mat3<T> inverse(const Mat3<T>& a, int m) {
  const T det = determinant(a, m);
  if (!(std::abs(value_of(det)) > 1e-24)) throw DegeneratePointError("singular metric");
  Mat3<T> r{};
  if (m == 1) {
    r[0][0] = T(1.0) / det;
  } else if (m == 2) {
    r[0][0] = a[1][1] / det;
    r[1][1] = a[0][0] / det;
    r[0][1] = -a[0][1] / det;
    r[1][0] = -a[1][0] / det;
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
        r[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / det;
      }
    }
  }
  return r;
}

template <class T>
using ChristoffelT = std::array<Mat3<T>, 3>;

template <class T>
ChristoffelT<T> metric_christoffel(const JetT<T>& j, Mat3<T>* metric = nullptr) {
  const int m = j.m;
  Mat3<T> g{};
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < j.n; ++c) g[a][b] += j.first[c][a] * j.first[c][b];
    }
  }
  // dg[l][a][b] = d_l g_ab
  std::array<Mat3<T>, 3> dg{};
  for (int l = 0; l < m; ++l) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        for (int c = 0; c < j.n; ++c) {
          dg[l][a][b] += j.second[a][l][c] * j.first[c][b] + j.first[c][a] * j.second[b][l][c];
        }
      }
    }
  }
  const Mat3<T> ginv = inverse(g, m);
  ChristoffelT<T> gamma{};
  for (int k = 0; k < m; ++k) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        for (int l = 0; l < m; ++l) {
          gamma[k][a][b] += 0.5 * ginv[k][l] * (dg[a][b][l] + dg[b][a][l] - dg[l][a][b]);
        }
      }
    }
  }
  if (metric) *metric = g;
  return gamma;
}

JetT<double> plain(const surfaces::Jet& jet) {
  JetT<double> j;
  j.n = jet.n;
  j.m = jet.m;
  for (int c = 0; c < jet.n; ++c) {
    for (int a = 0; a < jet.m; ++a) {
      j.first[c][a] = jet.first(c, a);
      for (int b = 0; b < jet.m; ++b) j.second[a][b][c] = jet.second[a][b][c];
    }
  }
  return j;
}

JetT<Dual1> directional(const surfaces::Jet& jet, const Chart::Third& third, int dir) {
  JetT<Dual1> j;
  j.n = jet.n;
  j.m = jet.m;
  for (int c = 0; c < jet.n; ++c) {
    for (int a = 0; a < jet.m; ++a) {
      j.first[c][a] = Dual1(jet.first(c, a), jet.second[a][dir][c]);
      for (int b = 0; b < jet.m; ++b) j.second[a][b][c] = Dual1(jet.second[a][b][c], third[a][b][dir][c]);
    }
  }
  return j;
}

Christoffel to_plain(const ChristoffelT<double>& g) {
  Christoffel out{};
  for (int k = 0; k < 3; ++k) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) out[k][a][b] = g[k][a][b];
    }
  }
  return out;
}

}  // namespace

Christoffel christoffel_from_jet(const surfaces::Jet& jet) { return to_plain(metric_christoffel(plain(jet))); }

Christoffel christoffel(const Chart& c, const Param& u, const DiffBackend& backend) {
  return christoffel_from_jet(c.jet(u, backend));
}

std::array<Christoffel, 3> christoffel_derivative(const Chart& c, const Param& u, const DiffBackend& backend,
                                                  double fd_step) {
  const int m = c.param_dim();
  std::array<Christoffel, 3> out{};
  if (backend.kind == DiffBackend::Kind::finite_difference) {
    for (int l = 0; l < m; ++l) {
      Param up = u;
      Param dn = u;
      up[l] += fd_step;
      dn[l] -= fd_step;
      const Christoffel gp = christoffel(c, up, backend);
      const Christoffel gm = christoffel(c, dn, backend);
      for (int k = 0; k < m; ++k) {
        for (int a = 0; a < m; ++a) {
          for (int b = 0; b < m; ++b) out[l][k][a][b] = (gp[k][a][b] - gm[k][a][b]) / (2.0 * fd_step);
        }
      }
    }
    return out;
  }
  const surfaces::Jet jet = c.jet(u, backend);
  const Chart::Third third = c.third_derivatives(u);
  for (int l = 0; l < m; ++l) {
    const auto g = metric_christoffel(directional(jet, third, l));
    for (int k = 0; k < m; ++k) {
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) out[l][k][a][b] = g[k][a][b].d;
      }
    }
  }
  return out;
}

namespace {

Tensor4 riemann_from(const Mat& g, const Christoffel& gamma, const std::array<Christoffel, 3>& dgamma, int m) {
  Tensor4 up{};
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          double r = dgamma[i][k][j][l] - dgamma[j][k][i][l];
          for (int p = 0; p < m; ++p) r += gamma[k][i][p] * gamma[p][j][l] - gamma[k][j][p] * gamma[p][i][l];
          up[k][l][i][j] = r;
        }
      }
    }
  }
  Tensor4 low{};
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          double r = 0.0;
          for (int p = 0; p < m; ++p) r += g(k, p) * up[p][l][i][j];
          low[k][l][i][j] = r;
        }
      }
    }
  }
  return low;
}

}  // namespace

Tensor4 riemann_coordinates(const Chart& c, const Param& u, const DiffBackend& backend) {
  const surfaces::Jet jet = c.jet(u, backend);
  const int m = jet.m;
  const Mat g = jet.first.transpose() * jet.first;
  return riemann_from(g, christoffel_from_jet(jet), christoffel_derivative(c, u, backend), m);
}

CurvatureData curvature(const Chart& c, const Param& u, const DiffBackend& backend) {
  const surfaces::Jet jet = c.jet(u, backend);
  const int m = jet.m;
  CurvatureData d;
  d.point = surfaces::gauss_point_from_jet(jet, u);
  const Mat q = gram_schmidt(d.point.basis, &d.frame_coeffs);
  const Mat& e = d.frame_coeffs;

  const Tensor4 low = riemann_from(d.point.metric, christoffel_from_jet(jet), christoffel_derivative(c, u, backend), m);

  // mixed[a][b][i][j]: frame indices a, b; coordinate indices i, j.
  Tensor4 mixed{};
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          double r = 0.0;
          for (int k = 0; k < m; ++k) {
            for (int l = 0; l < m; ++l) r += e(k, a) * e(l, b) * low[k][l][i][j];
          }
          mixed[a][b][i][j] = r;
        }
      }
    }
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int cc = 0; cc < m; ++cc) {
        for (int dd = 0; dd < m; ++dd) {
          double r = 0.0;
          for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) r += e(i, cc) * e(j, dd) * mixed[a][b][i][j];
          }
          d.riemann[a][b][cc][dd] = r;
        }
      }
    }
  }

  const CoordFrame frame = CoordFrame::coordinates(m);
  d.Omega = FormMatrix(m, frame, std::min(2, m));
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      DifferentialForm entry(frame, 2);
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          d.antisymmetry_residual =
              std::max(d.antisymmetry_residual, std::abs(mixed[a][b][i][j] + mixed[b][a][i][j]));
          const int idx[2] = {i, j};
          entry.add(forms::monomial(idx), 0.5 * (mixed[a][b][i][j] - mixed[b][a][i][j]));
        }
      }
      d.Omega.set(a, b, entry);
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        d.antisymmetry_residual = std::max(d.antisymmetry_residual, std::abs(mixed[a][a][i][j]));
      }
    }
  }
  if (d.antisymmetry_residual > 1e-4) {
    throw NumericalQualityError("curvature matrix fails antisymmetry (residual " +
                                std::to_string(d.antisymmetry_residual) + ")");
  }

  // omega = Q^T dQ; with d_i(basis) = Q dR + dQ R and E = R^{-1}, the strictly
  // lower part of Q^T (d_i basis) E is the lower part of omega.
  d.omega = FormMatrix(m, frame, 1);
  std::vector<Mat> lower(m);
  for (int i = 0; i < m; ++i) {
    Mat di(jet.n, m);
    for (int k = 0; k < m; ++k) di.col(k) = jet.second[k][i];
    lower[i] = q.transpose() * di * e;
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < a; ++b) {
      DifferentialForm entry(frame, 1);
      for (int i = 0; i < m; ++i) entry.add(forms::Monomial(1u << i), lower[i](a, b));
      d.omega.set(a, b, entry);
    }
  }

  d.euler = euler_form(d);
  return d;
}

CurvatureData curvature(const Hypersurface& h, const Param& u) { return curvature(h.require_chart(), u, h.backend); }

DifferentialForm euler_form(const CurvatureData& d) {
  const int m = d.point.m;
  const CoordFrame frame = CoordFrame::coordinates(m);
  if (m % 2 != 0) return DifferentialForm(frame, m);
  return forms::pfaffian(d.Omega) * forms::TPoly(conventions::kEulerSign * conventions::pfaffian_normalization(m));
}

// ---------------------------------------------------------------------------
// Projector connections

Mat ProjectorConnection::omega_hat_component(int a) const {
  const int n = static_cast<int>(P.rows());
  return (2.0 * P - Mat::Identity(n, n)) * dP[a];
}

FormMatrix ProjectorConnection::omega_hat() const {
  const int n = static_cast<int>(P.rows());
  FormMatrix w(n, frame, 1);
  std::vector<Mat> comps;
  for (int a = 0; a < frame.dim(); ++a) comps.push_back(omega_hat_component(a));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      DifferentialForm entry(frame, 1);
      for (int a = 0; a < frame.dim(); ++a) entry.add(forms::Monomial(1u << a), comps[a](i, j));
      w.set(i, j, entry);
    }
  }
  return w;
}

Vec ProjectorConnection::covariant_derivative(const Vec& s, const Vec& ds_a, int a) const {
  return P * (ds_a + omega_hat_component(a) * s);
}

namespace {

ProjectorConnection from_normal(const Vec& nu, const std::vector<Vec>& dnu, const CoordFrame& frame) {
  const int n = static_cast<int>(nu.size());
  ProjectorConnection c;
  c.frame = frame;
  c.P = Mat::Identity(n, n) - nu * nu.transpose();
  for (const Vec& d : dnu) c.dP.push_back(-(d * nu.transpose() + nu * d.transpose()));
  return c;
}

}  // namespace

ProjectorConnection projector_connection(const GaussPoint& p) {
  std::vector<Vec> dnu;
  for (int i = 0; i < p.m; ++i) dnu.push_back(p.normal_derivative.col(i));
  return from_normal(p.normal, dnu, CoordFrame::coordinates(p.m));
}

ProjectorConnection projector_connection_ambient(const surfaces::ImplicitSurface& s, const Vec& x) {
  const auto d = s.derivatives(x);
  const double gnorm = d.gradient.norm();
  if (gnorm <= 1e-8) throw DegeneratePointError("vanishing gradient in the ambient normal field");
  const Vec nu = d.gradient / gnorm;
  const int n = static_cast<int>(nu.size());
  const Mat tangential = Mat::Identity(n, n) - nu * nu.transpose();
  std::vector<Vec> dnu;
  for (int i = 0; i < n; ++i) dnu.push_back(tangential * d.hessian.col(i) / gnorm);
  return from_normal(nu, dnu, CoordFrame::coordinates(n, false, "x"));
}

ProjectorConnection projector_connection_sphere(const Vec& x) {
  const double r = x.norm();
  if (r <= 1e-12) throw DegeneratePointError("sphere normal field undefined at the origin");
  const Vec nu = x / r;
  const int n = static_cast<int>(nu.size());
  std::vector<Vec> dnu;
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    dnu.push_back((e - nu * nu[i]) / r);
  }
  return from_normal(nu, dnu, CoordFrame::coordinates(n, false, "x"));
}

// ---------------------------------------------------------------------------
// Pulled-back sphere projection vs Levi-Civita

Vec SphereField::operator()(const Vec& x) const {
  const Vec w = A * x + b;
  return w - x * x.dot(w);
}

Mat SphereField::jacobian(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  const Vec w = A * x + b;
  // d/dx [w - x (x.w)] = A - (x.w) I - x w^T - x x^T A
  return A - x.dot(w) * Mat::Identity(n, n) - x * w.transpose() - x * (x.transpose() * A);
}

SphereField SphereField::member(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  SphereField f;
  f.A = Mat(n, n);
  f.b = Vec(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) f.A(i, j) = dist(rng);
  }
  for (int i = 0; i < n; ++i) f.b[i] = dist(rng);
  return f;
}

double lemma1_residual(const Hypersurface& h, const Param& u, const SphereField& field, std::span<const double> y) {
  const Chart& c = h.require_chart();
  const surfaces::Jet jet = c.jet(u, h.backend);
  const GaussPoint p = surfaces::gauss_point_from_jet(jet, u);
  const int m = p.m;
  const int n = p.n;
  if (static_cast<int>(y.size()) != m) throw InputError("lemma1_residual: tangent vector has the wrong size");
  Vec ycoef(m);
  for (int i = 0; i < m; ++i) ycoef[i] = y[i];
  const double ynorm = std::sqrt(ycoef.dot(p.metric * ycoef));
  if (!(ynorm > 0.0)) throw InputError("lemma1_residual: zero tangent vector");
  ycoef /= ynorm;

  const Vec nu = p.normal;
  const Mat dX = field.jacobian(nu);
  const Vec X = field(nu);

  // Route (i): d nu from the cofactor derivative, projection at the sphere point nu.
  Vec dnu_y = Vec::Zero(n);
  for (int i = 0; i < m; ++i) dnu_y += ycoef[i] * surfaces::normal_derivative_cofactor(jet, i);
  const Mat p_nu = Mat::Identity(n, n) - nu * nu.transpose();
  const Vec route1 = p_nu * (dX * dnu_y);

  // Route (ii): components s^k = g^{kl} <d_l psi, X(nu)>, differentiated by the
  // product rule with d nu from the Weingarten relation.
  const Mat ginv = p.metric.inverse();
  const Vec s = ginv * (p.basis.transpose() * X);
  const Christoffel gamma = christoffel_from_jet(jet);
  Vec route2 = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    Mat dg(m, m);
    Mat di(n, m);
    for (int l = 0; l < m; ++l) di.col(l) = jet.second[i][l];
    dg = di.transpose() * p.basis + p.basis.transpose() * di;
    const Vec dX_i = dX * p.normal_derivative.col(i);
    const Vec ds = -ginv * dg * ginv * (p.basis.transpose() * X) + ginv * (di.transpose() * X + p.basis.transpose() * dX_i);
    Vec cov = ds;
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) cov[k] += gamma[k][i][j] * s[j];
    }
    route2 += ycoef[i] * (p.basis * cov);
  }
  return (route1 - route2).norm();
}

}  // namespace hopf::connection
