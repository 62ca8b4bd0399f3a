#include "scatsize/quadrature.hpp"

#include <cmath>

#include "scatsize/errors.hpp"

namespace scatsize {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre P_n(x) and derivative by recurrence.
      double p0 = 1.0, p1 = x;
      for (int l = 1; l < n; ++l) {
        double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1);
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::pair<Vec3, Vec3> orthonormal_complement(const RealDirection& pole) {
  Vec3 p = pole.vec();
  Vec3 ref = std::abs(p.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = cross(p, ref);
  u = (1.0 / norm(u)) * u;
  Vec3 w = cross(p, u);
  return {u, w};
}

SphereRule sphere_rule(const RealDirection& pole, int n_polar, int n_azimuth) {
  GaussLegendre gl = gauss_legendre(n_polar);
  auto [t1, t2] = orthonormal_complement(pole);
  Vec3 p = pole.vec();

  SphereRule rule;
  rule.points.reserve((size_t)n_polar * n_azimuth);
  rule.weights.reserve((size_t)n_polar * n_azimuth);
  rule.cos_polar.reserve((size_t)n_polar * n_azimuth);
  const double dphi = 2.0 * M_PI / n_azimuth;
  for (int i = 0; i < n_polar; ++i) {
    const double u = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
    const double wu = gl.weights[i] * dphi;
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = dphi * j;
      Vec3 s = u * p + (st * std::cos(phi)) * t1 + (st * std::sin(phi)) * t2;
      rule.points.push_back(s);
      rule.weights.push_back(wu);
      rule.cos_polar.push_back(u);
    }
  }
  return rule;
}

}  // namespace scatsize
