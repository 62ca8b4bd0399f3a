#pragma once

#include "scatsize/potential.hpp"

namespace scatsize {

struct LsOptions {
  double tol = 1e-8;      // relative residual target
  int max_iterations = 500;
  int restart = 50;       // GMRES restart length
  double spacing = 0.0;   // grid spacing for rasterizing analytic q; 0 = default rule
};

struct LsSolution {
  FieldGrid H;     // H = q psi on the grid
  FieldGrid psi;   // total field
  VoxelPotential q;
  int iterations = 0;
  double residual = 0.0;
  double max_abs_H = 0.0;
};

/// Closed form of int over the ball |u| <= rho of e^{ik|u|}/(4 pi |u|) du;
/// tends to rho^2/2 as k -> 0.  This replaces the singular self-cell weight
/// with rho = h (3/4pi)^{1/3}, the equivalent-volume radius.
std::complex<double> self_cell_integral(double k, double rho);

/// Solve psi = u0 - int g(x, y) q(y) psi(y) dy by collocation on the voxel
/// grid (kernel applied via zero-padded FFT convolution; singular self-cell
/// replaced by self_cell_integral), then return H = q psi.
///
/// Throws NyquistViolationError when h > pi/(4k) and NoConvergenceError when
/// the Krylov iteration exceeds its cap.
LsSolution solve_lippmann_schwinger(const PotentialSpec& q, const RealDirection& alpha, double k,
                                    const LsOptions& options = {});

}  // namespace scatsize
