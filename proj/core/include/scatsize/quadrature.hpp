#pragma once

#include <vector>

#include "scatsize/geometry.hpp"

namespace scatsize {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1], computed by Newton iteration from
/// Chebyshev starting guesses; deterministic.
GaussLegendre gauss_legendre(int n);

/// Orthonormal completion: two unit vectors spanning the plane normal to
/// `pole`, chosen deterministically.
std::pair<Vec3, Vec3> orthonormal_complement(const RealDirection& pole);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) measured
/// from `pole`, uniform trapezoid in azimuth.  Weights sum to 4*pi.
struct SphereRule {
  std::vector<Vec3> points;     // unit vectors
  std::vector<double> weights;  // solid-angle weights
  std::vector<double> cos_polar;
};

SphereRule sphere_rule(const RealDirection& pole, int n_polar, int n_azimuth);

}  // namespace scatsize
