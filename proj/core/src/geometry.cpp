#include "scatsize/geometry.hpp"

#include <algorithm>
#include <limits>

namespace scatsize {

void validate(const ShapeSpec& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          if (!(s.radius > 0.0)) throw DomainError("ball radius must be > 0");
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          if (!(s.sides.x > 0.0 && s.sides.y > 0.0 && s.sides.z > 0.0))
            throw DomainError("box side lengths must be > 0");
        } else {
          if (s.balls.empty()) throw DomainError("union of balls must be non-empty");
          for (const auto& b : s.balls)
            if (!(b.radius > 0.0)) throw DomainError("ball radius must be > 0");
        }
      },
      shape);
}

double support_extent(const ShapeSpec& shape, const RealDirection& v) {
  validate(shape);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return dot(v, s.center) + s.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          // Per axis the maximizing corner is the far face when v_j > 0.
          double h = dot(v, s.lower);
          for (int j = 0; j < 3; ++j)
            if (v[j] > 0.0) h += v[j] * s.sides[j];
          return h;
        } else {
          double h = -std::numeric_limits<double>::infinity();
          for (const auto& b : s.balls) h = std::max(h, dot(v, b.center) + b.radius);
          return h;
        }
      },
      shape);
}

double width(const ShapeSpec& shape, const RealDirection& v) {
  return support_extent(shape, v) + support_extent(shape, -v);
}

std::pair<Vec3, Vec3> bounding_box(const ShapeSpec& shape) {
  validate(shape);
  return std::visit(
      [](const auto& s) -> std::pair<Vec3, Vec3> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          Vec3 r{s.radius, s.radius, s.radius};
          return {s.center - r, s.center + r};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return {s.lower, s.lower + s.sides};
        } else {
          Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
          Vec3 hi = -lo;
          for (const auto& b : s.balls) {
            lo = {std::min(lo.x, b.center.x - b.radius), std::min(lo.y, b.center.y - b.radius),
                  std::min(lo.z, b.center.z - b.radius)};
            hi = {std::max(hi.x, b.center.x + b.radius), std::max(hi.y, b.center.y + b.radius),
                  std::max(hi.z, b.center.z + b.radius)};
          }
          return {lo, hi};
        }
      },
      shape);
}

double volume(const ShapeSpec& shape) {
  validate(shape);
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return 4.0 / 3.0 * M_PI * s.radius * s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return s.sides.x * s.sides.y * s.sides.z;
        } else {
          // Overlaps are not subtracted; unions are expected disjoint.
          double vtot = 0.0;
          for (const auto& b : s.balls) vtot += 4.0 / 3.0 * M_PI * b.radius * b.radius * b.radius;
          return vtot;
        }
      },
      shape);
}

ShapeSpec translated(const ShapeSpec& shape, Vec3 t) {
  return std::visit(
      [&](const auto& s) -> ShapeSpec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return Ball{s.center + t, s.radius};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return AxisBox{s.lower + t, s.sides};
        } else {
          UnionOfBalls u = s;
          for (auto& b : u.balls) b.center = b.center + t;
          return u;
        }
      },
      shape);
}

bool contains(const ShapeSpec& shape, Vec3 p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          Vec3 d = p - s.center;
          return dot(d, d) <= s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          for (int j = 0; j < 3; ++j)
            if (p[j] < s.lower[j] || p[j] > s.lower[j] + s.sides[j]) return false;
          return true;
        } else {
          for (const auto& b : s.balls) {
            Vec3 d = p - b.center;
            if (dot(d, d) <= b.radius * b.radius) return true;
          }
          return false;
        }
      },
      shape);
}

}  // namespace scatsize
