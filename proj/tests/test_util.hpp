#pragma once

#include <random>

#include "scatsize/geometry.hpp"

namespace scatsize::testutil {

inline RealDirection random_direction(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 v{n(rng), n(rng), n(rng)};
    if (norm(v) > 1e-3) return RealDirection::normalized(v);
  }
}

/// Orthonormal (w, v) pair, uniformly random orientation.
inline std::pair<RealDirection, RealDirection> random_pair(std::mt19937& rng) {
  RealDirection w = random_direction(rng);
  for (;;) {
    RealDirection u = random_direction(rng);
    Vec3 raw = u.vec() - dot(w, u) * w.vec();
    if (norm(raw) > 1e-3) return {w, RealDirection::normalized(raw)};
  }
}

/// Rodrigues rotation of v by `angle` about the unit `axis`.
inline Vec3 rotate_about(Vec3 v, Vec3 axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(axis, v) + ((1.0 - c) * dot(axis, v)) * axis;
}

inline Vec3 random_point_in(const ShapeSpec& shape, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return std::visit(
      [&](const auto& s) -> Vec3 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          std::normal_distribution<double> n(0.0, 1.0);
          Vec3 dir{n(rng), n(rng), n(rng)};
          double r = s.radius * std::cbrt(u01(rng));
          return s.center + (r / norm(dir)) * dir;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return s.lower + Vec3{u01(rng) * s.sides.x, u01(rng) * s.sides.y,
                                u01(rng) * s.sides.z};
        } else {
          std::uniform_int_distribution<size_t> pick(0, s.balls.size() - 1);
          return random_point_in(ShapeSpec{s.balls[pick(rng)]}, rng);
        }
      },
      shape);
}

}  // namespace scatsize::testutil
