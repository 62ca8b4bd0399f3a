#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "scatsize/errors.hpp"

namespace scatsize {

constexpr double kUnitTol = 1e-10;
constexpr double kOrthoTol = 1e-10;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Unit vector on S^2.  Construction re-normalizes after checking the input is
/// within kUnitTol of unit length, so the stored components satisfy
/// | |n| - 1 | <= 1e-12 exactly as downstream code assumes.
class RealDirection {
 public:
  RealDirection(double x, double y, double z) : v_{x, y, z} {
    const double n = norm(v_);
    if (std::abs(n - 1.0) > kUnitTol)
      throw NonUnitError("direction norm deviates from 1 by more than 1e-10");
    v_ = (1.0 / n) * v_;
  }
  explicit RealDirection(Vec3 v) : RealDirection(v.x, v.y, v.z) {}

  /// Normalizes an arbitrary nonzero vector.
  static RealDirection normalized(Vec3 v) {
    const double n = norm(v);
    if (n == 0.0) throw NonUnitError("cannot normalize the zero vector");
    return RealDirection((1.0 / n) * v);
  }

  Vec3 vec() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  double operator[](int i) const { return v_[i]; }

  RealDirection operator-() const { return RealDirection(-v_); }

 private:
  Vec3 v_;
};

inline double dot(const RealDirection& a, const RealDirection& b) { return dot(a.vec(), b.vec()); }
inline double dot(const RealDirection& a, Vec3 b) { return dot(a.vec(), b); }

inline RealDirection e1() { return RealDirection(1, 0, 0); }
inline RealDirection e2() { return RealDirection(0, 1, 0); }
inline RealDirection e3() { return RealDirection(0, 0, 1); }

/// Complex observation direction beta = a*w + i*b*v on the quadric
/// {z : z.z = 1} (bilinear product).  a = sqrt(1 + b^2) is always derived
/// from b, never stored independently.
class VarietyDirection {
 public:
  VarietyDirection(RealDirection w, RealDirection v, double b)
      : w_(w), v_(v), b_(b), a_(std::sqrt(1.0 + b * b)) {
    if (b < 0.0) throw NegativeBError("continuation parameter b must be >= 0");
    if (std::abs(dot(w, v)) > kOrthoTol)
      throw NonOrthogonalError("w and v must be orthogonal (|w.v| <= 1e-10)");
  }

  const RealDirection& w() const { return w_; }
  const RealDirection& v() const { return v_; }
  double b() const { return b_; }
  double a() const { return a_; }

  std::array<std::complex<double>, 3> beta() const {
    return {std::complex<double>(a_ * w_.x(), b_ * v_.x()),
            std::complex<double>(a_ * w_.y(), b_ * v_.y()),
            std::complex<double>(a_ * w_.z(), b_ * v_.z())};
  }

  /// Bilinear self product beta.beta; equals 1 up to rounding.
  std::complex<double> self_dot() const {
    auto bt = beta();
    return bt[0] * bt[0] + bt[1] * bt[1] + bt[2] * bt[2];
  }

  /// beta . alpha = a (w.alpha) + i b (v.alpha).
  std::complex<double> dot_real(const RealDirection& alpha) const {
    return {a_ * dot(w_, alpha), b_ * dot(v_, alpha)};
  }

 private:
  RealDirection w_, v_;
  double b_, a_;
};

inline VarietyDirection make_variety_direction(const RealDirection& w, const RealDirection& v,
                                               double b) {
  return VarietyDirection(w, v, b);
}

// --- scatterer geometry -----------------------------------------------------

struct Ball {
  Vec3 center;
  double radius = 0.0;
};

struct AxisBox {
  Vec3 lower;
  Vec3 sides;
};

struct UnionOfBalls {
  std::vector<Ball> balls;
};

using ShapeSpec = std::variant<Ball, AxisBox, UnionOfBalls>;

/// Throws DomainError unless radii/sides are strictly positive and union
/// lists are non-empty.
void validate(const ShapeSpec& shape);

/// Support function h(v) = sup over the shape of v.y, in length units.
double support_extent(const ShapeSpec& shape, const RealDirection& v);

/// Distance between the two parallel planes supporting the shape with normal
/// v: h(v) + h(-v).  Invariant under translation.
double width(const ShapeSpec& shape, const RealDirection& v);

/// Axis-aligned bounding box as (lower, upper).
std::pair<Vec3, Vec3> bounding_box(const ShapeSpec& shape);

double volume(const ShapeSpec& shape);

ShapeSpec translated(const ShapeSpec& shape, Vec3 t);

bool contains(const ShapeSpec& shape, Vec3 p);

}  // namespace scatsize
