#pragma once

// Levi-Civita connection of a chart, its curvature in an orthonormal frame,
// the normalized Euler form, and the projector connections on H x R^n.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hopf/forms.hpp"
#include "hopf/surfaces.hpp"

namespace hopf::conventions {

/// Sign applied to Pf(Omega); fixed so that the Euler form integrates to +2
/// over the round S^2.
inline constexpr int kEulerSign = 1;
/// Orientation of the fibre [0, 1] in fibre integration; fixed so that the
/// transgression form integrates to -1 over S^1.
inline constexpr int kFiberSign = 1;

/// (2 pi)^{-rank/2}, shared by the Euler form (rank n-1) and TPf (rank n).
double pfaffian_normalization(int rank);

}  // namespace hopf::conventions

namespace hopf::connection {

using surfaces::Chart;
using surfaces::DiffBackend;
using surfaces::GaussPoint;
using surfaces::Hypersurface;

/// gamma[k][i][j] = Gamma^k_{ij}.
using Christoffel = std::array<std::array<std::array<double, 3>, 3>, 3>;
/// riemann[a][b][c][d]; unused slots are zero.
using Tensor4 = std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>;

/// Christoffel symbols from the metric formula, with d g taken from the jet.
Christoffel christoffel_from_jet(const surfaces::Jet& jet);
Christoffel christoffel(const Chart& c, const Param& u, const DiffBackend& backend = {});

/// d[l][k][i][j] = d Gamma^k_{ij} / du_l. Exact for the analytic and dual
/// backends (third-order duals); central differences of Christoffel
/// evaluations with step `fd_step` for the finite-difference backend.
std::array<Christoffel, 3> christoffel_derivative(const Chart& c, const Param& u, const DiffBackend& backend,
                                                  double fd_step = 1e-4);

/// Coordinate Riemann tensor R_{klij} = g_{kp} R^p_{lij} with
/// R^k_{lij} = d_i Gamma^k_{jl} - d_j Gamma^k_{il} + Gamma^k_{ip} Gamma^p_{jl} - Gamma^k_{jp} Gamma^p_{il}.
Tensor4 riemann_coordinates(const Chart& c, const Param& u, const DiffBackend& backend);

struct CurvatureData {
  GaussPoint point;
  Mat frame_coeffs;          // E: e_a = sum_k E(k, a) d_k psi, orthonormal, chart-oriented
  forms::FormMatrix omega;   // connection 1-forms <e_a, nabla e_b> in the du frame
  forms::FormMatrix Omega;   // curvature 2-forms in the du frame
  Tensor4 riemann;           // orthonormal-frame R_{abcd}
  double antisymmetry_residual = 0.0;
  forms::DifferentialForm euler;
};

/// Throws NumericalQualityError when Omega fails antisymmetry by more than 1e-4.
CurvatureData curvature(const Chart& c, const Param& u, const DiffBackend& backend = {});
CurvatureData curvature(const Hypersurface& h, const Param& u);

/// s * Pf(Omega) / (2 pi)^{(n-1)/2}; the zero form when n - 1 is odd.
forms::DifferentialForm euler_form(const CurvatureData& d);

/// Projector P onto the tangent hyperplane and its first derivatives along
/// the coordinates of `frame`.
struct ProjectorConnection {
  forms::CoordFrame frame;
  Mat P;
  std::vector<Mat> dP;

  /// omega_hat = (2P - I) dP, the connection matrix of d (+) nabla^{S^{n-1}}
  /// pulled back, in the standard frame of R^n.
  forms::FormMatrix omega_hat() const;
  /// (2P - I) dP_a as a plain matrix.
  Mat omega_hat_component(int a) const;
  /// P (ds_a + omega_hat_a s): the tangential part of the projector
  /// connection acting on a section s with coordinate derivative ds_a.
  Vec covariant_derivative(const Vec& s, const Vec& ds_a, int a) const;
};

/// From the Gauss point of a chart: dP_a = -(d_a nu nu^T + nu d_a nu^T), frame u1..u_{n-1}.
ProjectorConnection projector_connection(const GaussPoint& p);
/// From the normal field grad F / |grad F| of a level function near x, frame x1..x_n.
ProjectorConnection projector_connection_ambient(const surfaces::ImplicitSurface& s, const Vec& x);
/// Same for the round sphere field x / |x| (no level function needed).
ProjectorConnection projector_connection_sphere(const Vec& x);

/// Tangent vector field on S^{n-1} of the form X(x) = (I - x x^T)(A x + b).
struct SphereField {
  Mat A;
  Vec b;

  Vec operator()(const Vec& x) const;
  /// Ambient derivative DX(x) (n x n).
  Mat jacobian(const Vec& x) const;

  /// Fixed family member: entries of A and b are seeded standard normals.
  static SphereField member(int n, std::uint64_t seed);
};

/// |route (i) - route (ii)| for the pulled-back field s = X o nu along the
/// tangent vector Y = sum_i y_i d_i psi (normalized to unit length):
///  (i)  P_nu DX(nu) d nu(Y), sphere projection connection pulled back by the Gauss map,
///  (ii) sum_i y_i (d_i s^k + Gamma^k_{ij} s^j) d_k psi, intrinsic Levi-Civita.
double lemma1_residual(const Hypersurface& h, const Param& u, const SphereField& field,
                       std::span<const double> y);

}  // namespace hopf::connection
