#include "hopf/transgression.hpp"

#include <cmath>
#include <random>

#include "hopf/error.hpp"
#include "hopf/parallel.hpp"

namespace hopf::transgression {

using connection::ProjectorConnection;
using forms::CoordFrame;
using forms::DifferentialForm;
using forms::FormMatrix;
using forms::Monomial;
using forms::TPoly;

namespace {

Monomial bits(int a, int b) { return static_cast<Monomial>((1u << a) | (1u << b)); }

void require_even(int n, const char* what) {
  if (n % 2 != 0) {
    throw UnsupportedParityError(std::string(what) + " needs an even ambient dimension (bundle rank n); got n = " +
                                 std::to_string(n));
  }
}

}  // namespace

FormMatrix path_connection(const ProjectorConnection& c) {
  const int n = static_cast<int>(c.P.rows());
  const int k = c.frame.dim();
  const CoordFrame ft = c.frame.with_t();
  FormMatrix w(n, ft, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      DifferentialForm entry(ft, 1);
      for (int a = 0; a < k; ++a) entry.add(Monomial(1u << (a + 1)), TPoly::one_minus_t() * c.omega_hat_component(a)(i, j));
      w.set(i, j, entry);
    }
  }
  return w;
}

FormMatrix path_curvature(const ProjectorConnection& c) {
  const int n = static_cast<int>(c.P.rows());
  const int k = c.frame.dim();
  const CoordFrame ft = c.frame.with_t();
  std::vector<Mat> w;
  for (int a = 0; a < k; ++a) w.push_back(c.omega_hat_component(a));
  const TPoly s1 = TPoly::one_minus_t();
  const TPoly s2 = s1 * s1;
  FormMatrix omega(n, ft, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      DifferentialForm entry(ft, 2);
      for (int a = 0; a < k; ++a) entry.add(bits(0, a + 1), -w[a](i, j));
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
          const double ddp = 2.0 * (c.dP[a] * c.dP[b] - c.dP[b] * c.dP[a])(i, j);
          const double ww = (w[a] * w[b] - w[b] * w[a])(i, j);
          entry.add(bits(a + 1, b + 1), s1 * ddp + s2 * ww);
        }
      }
      omega.set(i, j, entry);
    }
  }
  return omega;
}

DifferentialForm tpf_core(const ProjectorConnection& c) {
  const int n = static_cast<int>(c.P.rows());
  require_even(n, "the transgression form");
  const DifferentialForm pf = forms::pfaffian(path_curvature(c));
  const double scale = conventions::kFiberSign * conventions::pfaffian_normalization(n);
  return forms::integrate_t(forms::interior_dt(pf)) * TPoly(scale);
}

double TransgressionSample::density() const { return tpf.top_coefficient()[0] / volume_element; }

TransgressionSample tpf_form(const Hypersurface& h, const Param& u) {
  require_even(h.ambient_dim, "tpf_form");
  TransgressionSample s;
  s.u = u;
  switch (h.representation) {
    case surfaces::Representation::chart: {
      const auto p = surfaces::gauss_map(h, u);
      s.tpf = tpf_core(connection::projector_connection(p));
      s.volume_element = p.volume_element;
      return s;
    }
    case surfaces::Representation::implicit: {
      const auto& level = h.require_level_set();
      const Vec x = to_vec(u, h.ambient_dim);
      const auto p = surfaces::implicit_gauss_point(level, x);
      std::vector<double> jac;
      for (int r = 0; r < p.n; ++r) {
        for (int c = 0; c < p.m; ++c) jac.push_back(p.frame(r, c));
      }
      s.tpf = forms::pullback(tpf_ambient(level, x), CoordFrame::coordinates(p.m), jac);
      s.volume_element = 1.0;
      return s;
    }
    case surfaces::Representation::mesh:
      break;
  }
  throw InputError("tpf_form: shape '" + h.name + "' is a mesh");
}

DifferentialForm tpf_ambient(const surfaces::ImplicitSurface& s, const Vec& x) {
  return tpf_core(connection::projector_connection_ambient(s, x));
}

DifferentialForm tpf_sphere_ambient(const Vec& x) { return tpf_core(connection::projector_connection_sphere(x)); }

double ambient_exterior_derivative(const surfaces::ImplicitSurface& s, const Vec& x, double h) {
  const int n = s.ambient_dim();
  const Monomial all = static_cast<Monomial>((1u << n) - 1);
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const Monomial omit = static_cast<Monomial>(all & ~(1u << i));
    Vec up = x;
    Vec dn = x;
    up[i] += h;
    dn[i] -= h;
    const double deriv = (tpf_ambient(s, up).coefficient(omit)[0] - tpf_ambient(s, dn).coefficient(omit)[0]) / (2.0 * h);
    d += (i % 2 == 0 ? 1.0 : -1.0) * deriv;
  }
  return d;
}

std::vector<Param> sample_parameters(const surfaces::Chart& c, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& dom = c.domain();
  std::vector<Param> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    Param u{};
    for (int a = 0; a < dom.dim; ++a) {
      const double margin = dom.periodic[a] ? 0.0 : 1e-3 * dom.extent(a);
      std::uniform_real_distribution<double> dist(dom.lo[a] + margin, dom.hi[a] - margin);
      u[a] = dist(rng);
    }
    out.push_back(u);
  }
  return out;
}

ClosednessReport closedness_residual(const Hypersurface& h, int samples, std::uint64_t seed, double offset) {
  require_even(h.ambient_dim, "closedness_residual");
  const auto& level = h.require_level_set();
  const auto& chart = h.require_chart();
  const auto params = sample_parameters(chart, samples, seed);
  std::vector<double> residual(params.size() * 3);
  parallel::for_each_index(residual.size(), [&](std::size_t idx) {
    const auto p = surfaces::gauss_map(h, params[idx / 3]);
    const double s = (static_cast<int>(idx % 3) - 1) * offset;
    residual[idx] = std::abs(ambient_exterior_derivative(level, p.position + s * p.normal));
  });
  ClosednessReport r;
  r.points = static_cast<int>(residual.size());
  for (double v : residual) r.max_residual = std::max(r.max_residual, v);
  return r;
}

double naturality_residual(const Hypersurface& h, const Param& u) {
  const auto& chart = h.require_chart();
  const auto jet = chart.jet(u, h.backend);
  const auto p = surfaces::gauss_point_from_jet(jet, u);
  std::vector<double> jac(static_cast<std::size_t>(p.n * p.m));
  for (int c = 0; c < p.m; ++c) {
    const Vec d = surfaces::normal_derivative_cofactor(jet, c);
    for (int r = 0; r < p.n; ++r) jac[r * p.m + c] = d[r];
  }
  const DifferentialForm pulled =
      forms::pullback(tpf_sphere_ambient(p.normal), CoordFrame::coordinates(p.m), jac);
  const DifferentialForm intrinsic = tpf_form(h, u).tpf;
  return std::abs(pulled.top_coefficient()[0] - intrinsic.top_coefficient()[0]);
}

SymmetryReport sphere_symmetry(const Hypersurface& h, int samples, std::uint64_t seed) {
  const auto params = sample_parameters(h.require_chart(), samples, seed);
  std::vector<double> density(params.size());
  parallel::for_each_index(params.size(), [&](std::size_t i) { density[i] = tpf_form(h, params[i]).density(); });
  SymmetryReport r;
  r.mean = parallel::pairwise_sum(density) / static_cast<double>(density.size());
  for (double d : density) r.max_deviation = std::max(r.max_deviation, std::abs(d - r.mean));
  return r;
}

degree::DegreeEstimate integrate_tpf(const Hypersurface& h, std::span<const int> resolution) {
  require_even(h.ambient_dim, "integrate_tpf");
  return degree::quadrature_estimate("tpf_integral", h, resolution, [&](const surfaces::QuadratureNode& node) {
    return tpf_form(h, node.u).tpf.top_coefficient()[0];
  });
}

degree::DegreeEstimate hopf_even_degree(const Hypersurface& h, std::span<const int> resolution) {
  degree::DegreeEstimate e = integrate_tpf(h, resolution);
  e.estimator = "tpf";
  e.value = -e.value;
  e.rounded = static_cast<int>(std::lround(e.value));
  return e;
}

}  // namespace hopf::transgression
