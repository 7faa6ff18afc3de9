#pragma once

// Transgression form TPf between the trivial connection and the projector
// connection, via the affine path omega_t = (1 - t) omega_hat on [0,1] x H:
//   Omega_t = -dt ^ omega_hat + (1 - t) 2 dP ^ dP + (1 - t)^2 omega_hat ^ omega_hat,
//   TPf = kFiberSign (2 pi)^{-n/2} integral_0^1 i_{d/dt} Pf(Omega_t).

#include <cstdint>
#include <span>
#include <vector>

#include "hopf/connection.hpp"
#include "hopf/degree.hpp"
#include "hopf/forms.hpp"
#include "hopf/surfaces.hpp"

namespace hopf::transgression {

using surfaces::Hypersurface;

/// Curvature of the path connection in the frame (t, frame...).
forms::FormMatrix path_curvature(const connection::ProjectorConnection& c);
/// Connection matrix (1 - t) omega_hat in the frame (t, frame...).
forms::FormMatrix path_connection(const connection::ProjectorConnection& c);

/// Normalized fibre integral of Pf(path_curvature); a form of degree
/// frame.dim() - 1 in the frame of `c` (requires an even rank).
forms::DifferentialForm tpf_core(const connection::ProjectorConnection& c);

struct TransgressionSample {
  Param u{};
  forms::DifferentialForm tpf;  // top-degree on H in the du frame
  double volume_element = 0.0;

  /// tpf / dVol.
  double density() const;
};

/// TPf at chart parameter u (chart shapes) or at a point of the level set
/// (implicit shapes, expressed in the positive orthonormal tangent frame).
/// Throws UnsupportedParityError for odd n.
TransgressionSample tpf_form(const Hypersurface& h, const Param& u);

/// TPf of the ambient field grad F / |grad F| at x, an (n-1)-form in x1..xn.
forms::DifferentialForm tpf_ambient(const surfaces::ImplicitSurface& s, const Vec& x);
/// TPf of the round-sphere field x / |x|.
forms::DifferentialForm tpf_sphere_ambient(const Vec& x);

/// Coefficient of d(tpf_ambient) at x by central differences with step h.
double ambient_exterior_derivative(const surfaces::ImplicitSurface& s, const Vec& x, double h = 1e-4);

struct ClosednessReport {
  double max_residual = 0.0;
  int points = 0;
};

/// Max |d TPf| over points psi(u) + s nu(u) for seeded chart samples u and
/// offsets s in {-offset, 0, offset}.
ClosednessReport closedness_residual(const Hypersurface& h, int samples, std::uint64_t seed, double offset = 0.05);

/// |tpf_form(H, u) - (Gauss map)^* tpf_sphere_ambient(nu(u))| on the top coefficient.
double naturality_residual(const Hypersurface& h, const Param& u);

struct SymmetryReport {
  double mean = 0.0;
  double max_deviation = 0.0;
};

/// Spread of tpf / dVol over seeded sample points.
SymmetryReport sphere_symmetry(const Hypersurface& h, int samples, std::uint64_t seed);

/// Seeded chart parameters strictly inside the domain.
std::vector<Param> sample_parameters(const surfaces::Chart& c, int count, std::uint64_t seed);

/// integral_H TPf with the difference to half resolution as the error bar.
degree::DegreeEstimate integrate_tpf(const Hypersurface& h, std::span<const int> resolution = {});

/// - integral_H TPf; equals deg of the Gauss map and chi(W) for even n.
degree::DegreeEstimate hopf_even_degree(const Hypersurface& h, std::span<const int> resolution = {});

}  // namespace hopf::transgression
