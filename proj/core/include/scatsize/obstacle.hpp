#pragma once

#include <complex>
#include <vector>

#include "scatsize/geometry.hpp"
#include "scatsize/log_complex.hpp"

namespace scatsize {

/// Sound-soft (Dirichlet) sphere.
struct SphereObstacle {
  double radius = 1.0;
  Vec3 center{0, 0, 0};
  double k = 1.0;
};

/// Partial-wave coefficients T_l = -j_l(kR)/h^(1)_l(kR).  |T_l| <= 1 and
/// |1 + 2 T_l| = 1 on the real k axis; values below the double range are kept
/// in `T_log`, the plain `T` entries underflow to zero there.
struct MieCoefficients {
  double k = 0.0;
  double radius = 0.0;
  std::vector<std::complex<double>> T;
  std::vector<LogComplex> T_log;
};

MieCoefficients mie_coefficients(const SphereObstacle& sphere, int lmax);

/// Far-field amplitude of the origin-centered sphere as a function of the
/// (generally complex) dot product t = beta.alpha:
///   A(t) = (1/(ik)) sum_l (2l+1) T_l P_l(t),
/// summed in log-scaled form with adaptive truncation.  Off-center spheres
/// are handled by the caller through the exact translation phase factor.
LogComplex sphere_amplitude(const SphereObstacle& sphere, std::complex<double> t);

/// Normal derivative of the total field on the sphere surface (outer normal),
/// via the Wronskian-simplified partial-wave series.  `s` must lie on the
/// surface to within 1e-9 * R.
std::complex<double> sphere_normal_derivative(const SphereObstacle& sphere,
                                              const RealDirection& alpha, Vec3 s);

/// A(beta, alpha) = -(1/4pi) oint_S e^{-ik beta.s} u_N(s, alpha) ds, by
/// Gauss-Legendre in the polar angle aligned with Im beta times a uniform
/// trapezoid in azimuth, with e^{k b (v.c + R)} factored out so the scaled
/// integrand stays at u_N scale.
LogComplex amplitude_via_surface_integral(const SphereObstacle& sphere, const RealDirection& alpha,
                                          const VarietyDirection& beta);

/// Total field u(x) = u0(x) - oint_S g(x, s) u_N(s) ds for x outside the
/// sphere; quadrature pole aligned with the direction from center to x.
std::complex<double> scattered_field(const SphereObstacle& sphere, const RealDirection& alpha,
                                     Vec3 x);

/// Largest |u_N| over a surface quadrature grid; the constant in the growth
/// envelope ln|A| <= ln(max|u_N| R^2) + k b h(v).
double max_normal_derivative(const SphereObstacle& sphere, const RealDirection& alpha);

/// Quadrature orders used by amplitude_via_surface_integral.
int surface_quadrature_polar_order(double k, double b, double radius);

}  // namespace scatsize
