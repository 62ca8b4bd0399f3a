#pragma once

#include <array>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "scatsize/geometry.hpp"
#include "scatsize/log_complex.hpp"

namespace scatsize {

/// Radial modulation of an analytic potential (Ball shapes only).
struct RadialProfile {
  enum class Kind { Gaussian } kind = Kind::Gaussian;
  double sigma = 1.0;  // q(r) = q0 exp(-r^2 / (2 sigma^2)), truncated at R
};

struct AnalyticPotential {
  ShapeSpec shape;
  double q0 = 1.0;
  std::optional<RadialProfile> profile;  // constant q0 when absent
  // UnionOfBalls potentials superpose per-ball densities; overlaps add.
};

/// Piecewise-constant q on a cubic grid.  Values are real; the support must
/// keep at least one zero cell on every face of the box.
struct VoxelPotential {
  Vec3 origin;          // lower corner of cell (0,0,0)
  double spacing = 0.0; // cubic cell edge h
  std::array<int, 3> dims{0, 0, 0};
  std::vector<double> values;  // row-major, last index fastest

  size_t index(int i1, int i2, int i3) const {
    return ((size_t)i1 * dims[1] + i2) * dims[2] + i3;
  }
  Vec3 cell_center(int i1, int i2, int i3) const {
    return origin + Vec3{(i1 + 0.5) * spacing, (i2 + 0.5) * spacing, (i3 + 0.5) * spacing};
  }
};

using PotentialSpec = std::variant<AnalyticPotential, VoxelPotential>;

/// Throws DomainError on invalid geometry or a support touching the grid
/// boundary.
void validate(const PotentialSpec& q);

/// Complex field sampled on the same grid geometry as a VoxelPotential;
/// holds psi or H = q psi.
struct FieldGrid {
  Vec3 origin;
  double spacing = 0.0;
  std::array<int, 3> dims{0, 0, 0};
  std::vector<std::complex<double>> values;

  size_t index(int i1, int i2, int i3) const {
    return ((size_t)i1 * dims[1] + i2) * dims[2] + i3;
  }
  Vec3 cell_center(int i1, int i2, int i3) const {
    return origin + Vec3{(i1 + 0.5) * spacing, (i2 + 0.5) * spacing, (i3 + 0.5) * spacing};
  }
  double max_abs() const;
};

/// e^{i k (alpha - beta).t} as LogComplex; logmag is exactly k b (v.t).
LogComplex translation_phase(const RealDirection& alpha, const VarietyDirection& beta, Vec3 t,
                             double k);

/// First Born approximation A_Born = -(1/4pi) int q(y) e^{ik(alpha-beta).y} dy.
/// Boxes and constant balls use exact closed forms; Gaussian-profile balls a
/// log-scaled radial quadrature; voxel grids exact per-cell tensor-product
/// integration of the piecewise-constant density.
LogComplex born_amplitude(const PotentialSpec& q, const RealDirection& alpha,
                          const VarietyDirection& beta, double k);

/// -(1/4pi) int e^{-ik beta.y} H(y) dy with per-cell exact integration,
/// log-scaled by the support peak of e^{k b v.y}.
LogComplex amplitude_from_H(const FieldGrid& H, const VarietyDirection& beta, double k);

/// Rasterize an analytic potential onto a cubic grid with spacing h and two
/// padding cells per face.  Balls use 4^3 subsampling per cell; box overlap
/// fractions are exact.
VoxelPotential rasterize(const AnalyticPotential& q, double h);

/// Default grid spacing: 24^3 over the support bounding box (2 padding cells
/// per side) tightened to the h <= pi/(4k) Nyquist guard.
double default_grid_spacing(const AnalyticPotential& q, double k);

/// sup of v.y over the closed support cells (q != 0), using each cell's far
/// corner in direction v.
double voxel_support_extent(const VoxelPotential& q, const RealDirection& v);

double voxel_support_volume(const VoxelPotential& q);

double max_abs_value(const VoxelPotential& q);

}  // namespace scatsize
