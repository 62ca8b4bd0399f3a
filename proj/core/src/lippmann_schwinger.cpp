#include "scatsize/lippmann_schwinger.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "scatsize/errors.hpp"

namespace scatsize {

namespace {

using cd = std::complex<double>;

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Zero-padded circular convolution with a fixed kernel, sized for linear
// convolution over offset range (-(n-1), n-1) per axis.
class KernelConvolution {
 public:
  KernelConvolution(const std::array<int, 3>& dims, double h, double k) : n_(dims) {
    for (int j = 0; j < 3; ++j) p_[j] = 2 * n_[j];
    total_ = (size_t)p_[0] * p_[1] * p_[2];

    buf_ = fftw_alloc_complex(total_);
    khat_ = fftw_alloc_complex(total_);
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fwd_ = fftw_plan_dft_3d(p_[0], p_[1], p_[2], buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_3d(p_[0], p_[1], p_[2], buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    const double rho = h * std::cbrt(3.0 / (4.0 * M_PI));
    const cd self = self_cell_integral(k, rho);

    // Off-diagonal: midpoint kernel with the second-moment cell correction
    // (1 - (kh)^2/24); exact through O(h^4) since grad^2 g = -k^2 g off the
    // singular cell.
    const double corr = 1.0 - (k * h) * (k * h) / 24.0;
    const double cellvol = h * h * h;

    std::fill(reinterpret_cast<cd*>(buf_), reinterpret_cast<cd*>(buf_) + total_, cd(0.0, 0.0));
    cd* b = reinterpret_cast<cd*>(buf_);
    for (int d1 = -(n_[0] - 1); d1 <= n_[0] - 1; ++d1)
      for (int d2 = -(n_[1] - 1); d2 <= n_[1] - 1; ++d2)
        for (int d3 = -(n_[2] - 1); d3 <= n_[2] - 1; ++d3) {
          cd val;
          if (d1 == 0 && d2 == 0 && d3 == 0) {
            val = self;
          } else {
            const double r = h * std::sqrt((double)d1 * d1 + (double)d2 * d2 + (double)d3 * d3);
            val = corr * cellvol * std::exp(cd(0.0, k * r)) / (4.0 * M_PI * r);
          }
          const int w1 = d1 >= 0 ? d1 : d1 + p_[0];
          const int w2 = d2 >= 0 ? d2 : d2 + p_[1];
          const int w3 = d3 >= 0 ? d3 : d3 + p_[2];
          b[((size_t)w1 * p_[1] + w2) * p_[2] + w3] = val;
        }
    fftw_execute(fwd_);
    std::copy(reinterpret_cast<cd*>(buf_), reinterpret_cast<cd*>(buf_) + total_,
              reinterpret_cast<cd*>(khat_));
  }

  ~KernelConvolution() {
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(bwd_);
    }
    fftw_free(buf_);
    fftw_free(khat_);
  }

  KernelConvolution(const KernelConvolution&) = delete;
  KernelConvolution& operator=(const KernelConvolution&) = delete;

  // out = K * in on the n-grid (row-major, last index fastest).
  void apply(const std::vector<cd>& in, std::vector<cd>& out) const {
    cd* b = reinterpret_cast<cd*>(buf_);
    std::fill(b, b + total_, cd(0.0, 0.0));
    for (int i1 = 0; i1 < n_[0]; ++i1)
      for (int i2 = 0; i2 < n_[1]; ++i2)
        std::copy(&in[((size_t)i1 * n_[1] + i2) * n_[2]],
                  &in[((size_t)i1 * n_[1] + i2) * n_[2]] + n_[2],
                  b + ((size_t)i1 * p_[1] + i2) * p_[2]);
    fftw_execute(fwd_);
    const cd* kh = reinterpret_cast<const cd*>(khat_);
    for (size_t i = 0; i < total_; ++i) b[i] *= kh[i];
    fftw_execute(bwd_);
    const double scale = 1.0 / (double)total_;
    out.resize((size_t)n_[0] * n_[1] * n_[2]);
    for (int i1 = 0; i1 < n_[0]; ++i1)
      for (int i2 = 0; i2 < n_[1]; ++i2)
        for (int i3 = 0; i3 < n_[2]; ++i3)
          out[((size_t)i1 * n_[1] + i2) * n_[2] + i3] =
              scale * b[((size_t)i1 * p_[1] + i2) * p_[2] + i3];
  }

 private:
  std::array<int, 3> n_;
  std::array<int, 3> p_;
  size_t total_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_complex* khat_ = nullptr;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

double vec_norm(const std::vector<cd>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cd vec_dot(const std::vector<cd>& a, const std::vector<cd>& b) {
  cd s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Restarted GMRES on the matrix-free operator; minimizes the residual at
// every inner step, so the returned residual is monotone.
template <typename Op>
int gmres(const Op& apply, const std::vector<cd>& rhs, std::vector<cd>& x, double tol,
          int max_iter, int restart, double* final_rel) {
  const size_t n = rhs.size();
  const double bnorm = vec_norm(rhs);
  if (bnorm == 0.0) {
    x.assign(n, cd(0.0, 0.0));
    *final_rel = 0.0;
    return 0;
  }
  x.assign(n, cd(0.0, 0.0));
  int total_iters = 0;
  std::vector<std::vector<cd>> V;
  std::vector<cd> w(n);

  while (total_iters < max_iter) {
    std::vector<cd> r(n);
    apply(x, w);
    for (size_t i = 0; i < n; ++i) r[i] = rhs[i] - w[i];
    double beta = vec_norm(r);
    *final_rel = beta / bnorm;
    if (*final_rel <= tol) return total_iters;

    const int m = std::min(restart, max_iter - total_iters);
    V.assign(1, r);
    for (auto& z : V[0]) z /= beta;
    std::vector<std::vector<cd>> Hm(m + 1, std::vector<cd>(m, cd(0.0, 0.0)));
    std::vector<cd> cs(m), sn(m), g(m + 1, cd(0.0, 0.0));
    g[0] = beta;
    int j = 0;
    for (; j < m; ++j) {
      apply(V[j], w);
      for (int i = 0; i <= j; ++i) {
        Hm[i][j] = vec_dot(V[i], w);
        for (size_t q = 0; q < n; ++q) w[q] -= Hm[i][j] * V[i][q];
      }
      double hnorm = vec_norm(w);
      Hm[j + 1][j] = hnorm;
      if (hnorm > 0.0) {
        V.push_back(w);
        for (auto& z : V.back()) z /= hnorm;
      }
      // Apply accumulated Givens rotations, then form a new one.
      for (int i = 0; i < j; ++i) {
        cd t = cs[i] * Hm[i][j] + sn[i] * Hm[i + 1][j];
        Hm[i + 1][j] = -std::conj(sn[i]) * Hm[i][j] + std::conj(cs[i]) * Hm[i + 1][j];
        Hm[i][j] = t;
      }
      double denom = std::sqrt(std::norm(Hm[j][j]) + std::norm(Hm[j + 1][j]));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = std::abs(Hm[j][j]) / denom;
        cd phase = Hm[j][j] == cd(0.0, 0.0) ? cd(1.0, 0.0) : Hm[j][j] / std::abs(Hm[j][j]);
        sn[j] = phase * std::conj(Hm[j + 1][j]) / denom;
      }
      Hm[j][j] = cs[j] * Hm[j][j] + sn[j] * Hm[j + 1][j];
      Hm[j + 1][j] = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      ++total_iters;
      *final_rel = std::abs(g[j + 1]) / bnorm;
      if (*final_rel <= tol || hnorm == 0.0) {
        ++j;
        break;
      }
    }
    // Back-substitute and update x.
    std::vector<cd> ym(j, cd(0.0, 0.0));
    for (int i = j - 1; i >= 0; --i) {
      cd s = g[i];
      for (int q = i + 1; q < j; ++q) s -= Hm[i][q] * ym[q];
      ym[i] = s / Hm[i][i];
    }
    for (int i = 0; i < j; ++i)
      for (size_t q = 0; q < n; ++q) x[q] += ym[i] * V[i][q];
    if (*final_rel <= tol) {
      apply(x, w);
      double rr = 0.0;
      for (size_t q = 0; q < n; ++q) rr += std::norm(rhs[q] - w[q]);
      *final_rel = std::sqrt(rr) / bnorm;
      if (*final_rel <= tol) return total_iters;
    }
  }
  return total_iters;
}

}  // namespace

std::complex<double> self_cell_integral(double k, double rho) {
  // int_0^rho r e^{ikr} dr = rho e^{ik rho}/(ik) + (e^{ik rho} - 1)/k^2;
  // the closed form cancels badly once k rho << 1, where the Taylor series
  // rho^2 sum (ik rho)^n / (n! (n+2)) takes over (limit rho^2/2).
  const cd z(0.0, k * rho);
  if (std::abs(z) < 1e-3) {
    cd term(1.0, 0.0);
    cd sum = term / 2.0;
    for (int n = 1; n <= 6; ++n) {
      term *= z / (double)n;
      sum += term / (double)(n + 2);
    }
    return rho * rho * sum;
  }
  const cd ik(0.0, k);
  const cd eik = std::exp(ik * rho);
  return rho * eik / ik + (eik - 1.0) / (k * k);
}

LsSolution solve_lippmann_schwinger(const PotentialSpec& q, const RealDirection& alpha, double k,
                                    const LsOptions& options) {
  if (!(k > 0.0)) throw DomainError("solve_lippmann_schwinger: k must be > 0");
  validate(q);

  VoxelPotential grid;
  if (const auto* ap = std::get_if<AnalyticPotential>(&q)) {
    const double h = options.spacing > 0.0 ? options.spacing : default_grid_spacing(*ap, k);
    grid = rasterize(*ap, h);
  } else {
    grid = std::get<VoxelPotential>(q);
  }
  if (grid.spacing > M_PI / (4.0 * k) * (1.0 + 1e-12))
    throw NyquistViolationError("grid spacing violates h <= pi/(4k)");

  const size_t n = grid.values.size();
  std::vector<cd> u0(n);
  for (int i1 = 0; i1 < grid.dims[0]; ++i1)
    for (int i2 = 0; i2 < grid.dims[1]; ++i2)
      for (int i3 = 0; i3 < grid.dims[2]; ++i3) {
        Vec3 yc = grid.cell_center(i1, i2, i3);
        u0[grid.index(i1, i2, i3)] = std::polar(1.0, k * dot(alpha.vec(), yc));
      }

  LsSolution sol;
  sol.q = grid;
  sol.psi.origin = grid.origin;
  sol.psi.spacing = grid.spacing;
  sol.psi.dims = grid.dims;
  sol.H = sol.psi;

  bool all_zero = std::all_of(grid.values.begin(), grid.values.end(),
                              [](double v) { return v == 0.0; });
  if (all_zero) {
    sol.psi.values = u0;
    sol.H.values.assign(n, cd(0.0, 0.0));
    sol.iterations = 0;
    sol.residual = 0.0;
    sol.max_abs_H = 0.0;
    return sol;
  }

  KernelConvolution conv(grid.dims, grid.spacing, k);
  std::vector<cd> tmp(n);
  auto apply = [&](const std::vector<cd>& in, std::vector<cd>& out) {
    // out = in + K (q .* in)
    std::vector<cd> qin(n);
    for (size_t i = 0; i < n; ++i) qin[i] = grid.values[i] * in[i];
    conv.apply(qin, out);
    for (size_t i = 0; i < n; ++i) out[i] += in[i];
  };

  std::vector<cd> psi;
  double rel = 0.0;
  int iters = gmres(apply, u0, psi, options.tol, options.max_iterations, options.restart, &rel);
  if (rel > options.tol)
    throw NoConvergenceError("solve_lippmann_schwinger: GMRES exceeded the iteration cap");

  sol.psi.values = std::move(psi);
  sol.H.values.resize(n);
  for (size_t i = 0; i < n; ++i) sol.H.values[i] = grid.values[i] * sol.psi.values[i];
  sol.iterations = iters;
  sol.residual = rel;
  sol.max_abs_H = sol.H.max_abs();
  return sol;
}

}  // namespace scatsize
