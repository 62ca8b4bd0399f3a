#include "scatsize/potential.hpp"

#include <algorithm>
#include <cmath>

#include "scatsize/errors.hpp"
#include "scatsize/quadrature.hpp"

namespace scatsize {

namespace {

// (sin z - z cos z)/z^3, the unit-ball transform factor, in log form.  The
// series branch keeps the removable singularity exact.
LogComplex ball_form_factor(std::complex<double> z) {
  if (std::abs(z) < 1e-2) {
    std::complex<double> z2 = z * z;
    std::complex<double> f =
        1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0 - z2 * z2 * z2 / 45360.0;
    return LogComplex::from_complex(f);
  }
  LogComplex s = log_sin(z);
  LogComplex c = log_cos(z) * LogComplex::from_complex(z);
  LogComplex num = s - c;
  return num / (LogComplex::from_complex(z) * LogComplex::from_complex(z) *
                LogComplex::from_complex(z));
}

// int_0^L e^{i c y} dy as LogComplex, c complex.
LogComplex segment_factor(std::complex<double> c, double L) {
  std::complex<double> z = std::complex<double>(0.0, 1.0) * c * L;
  if (std::abs(z) < 1e-8) {
    return LogComplex::from_complex(L * (1.0 + z / 2.0 + z * z / 6.0));
  }
  // (e^{z} - 1)/(i c): |e^z| = e^{Re z}.
  LogComplex ez = LogComplex::from_polar_log(z.real(), z.imag());
  LogComplex num = ez - LogComplex::from_real(1.0);
  return num / std::complex<double>(0.0, 1.0) / c;
}

// e^{i c y0} for complex c: logmag = -Im(c) y0.
LogComplex point_phase(std::complex<double> c, double y0) {
  return LogComplex::from_polar_log(-c.imag() * y0, c.real() * y0);
}

// Per-axis coefficients c_j with e^{i c.y}: for the Born kernel
// e^{ik(alpha - beta).y}, for plain e^{-ik beta.y} pass alpha terms as zero.
std::array<std::complex<double>, 3> axis_coefficients(const RealDirection* alpha,
                                                      const VarietyDirection& beta, double k) {
  std::array<std::complex<double>, 3> c;
  auto bv = beta.beta();
  for (int j = 0; j < 3; ++j) {
    double aj = alpha ? (*alpha)[j] : 0.0;
    c[j] = k * (std::complex<double>(aj, 0.0) - bv[j]);
  }
  return c;
}

// Cell integrals along one axis: G[i] = int_{o + i h}^{o + (i+1) h} e^{icy} dy.
std::vector<LogComplex> axis_cell_factors(std::complex<double> c, double origin, double h,
                                          int n) {
  LogComplex base = segment_factor(c, h);
  std::vector<LogComplex> out(n);
  for (int i = 0; i < n; ++i) out[i] = point_phase(c, origin + i * h) * base;
  return out;
}

LogComplex ball_born(const Ball& ball, double q0, const RealDirection& alpha,
                     const VarietyDirection& beta, double k) {
  std::complex<double> t = beta.dot_real(alpha);
  std::complex<double> zeta = k * std::sqrt(std::complex<double>(2.0, 0.0) - 2.0 * t);
  double R = ball.radius;
  LogComplex vol = ball_form_factor(zeta * R) *
                   LogComplex::from_real(4.0 * M_PI * R * R * R * q0);
  return vol * translation_phase(alpha, beta, ball.center, k);
}

LogComplex gaussian_ball_born(const Ball& ball, double q0, const RadialProfile& prof,
                              const RealDirection& alpha, const VarietyDirection& beta,
                              double k) {
  // 4 pi int_0^R q(r) r^2 sinc(zeta r) dr with sinc z = sin z / z at the
  // complex continuation zeta = k sqrt(2 - 2 t); log-scaled against the
  // exponential growth of |sin|.
  std::complex<double> t = beta.dot_real(alpha);
  std::complex<double> zeta = k * std::sqrt(std::complex<double>(2.0, 0.0) - 2.0 * t);
  const double R = ball.radius;
  GaussLegendre gl = gauss_legendre(200);
  LogAccumulator acc;
  for (int i = 0; i < (int)gl.nodes.size(); ++i) {
    const double r = 0.5 * R * (gl.nodes[i] + 1.0);
    const double wt = 0.5 * R * gl.weights[i];
    const double qr = q0 * std::exp(-r * r / (2.0 * prof.sigma * prof.sigma));
    std::complex<double> zr = zeta * r;
    LogComplex kern;
    if (std::abs(zr) < 1e-6) {
      kern = LogComplex::from_complex(1.0 - zr * zr / 6.0);
    } else {
      kern = log_sin(zr) / LogComplex::from_complex(zr);
    }
    acc.add(kern * LogComplex::from_real(wt * qr * r * r * 4.0 * M_PI));
  }
  return acc.value() * translation_phase(alpha, beta, ball.center, k);
}

LogComplex box_born(const AxisBox& box, double q0, const RealDirection& alpha,
                    const VarietyDirection& beta, double k) {
  auto c = axis_coefficients(&alpha, beta, k);
  LogComplex out = LogComplex::from_real(q0);
  const double lower[3] = {box.lower.x, box.lower.y, box.lower.z};
  const double sides[3] = {box.sides.x, box.sides.y, box.sides.z};
  for (int j = 0; j < 3; ++j)
    out = out * point_phase(c[j], lower[j]) * segment_factor(c[j], sides[j]);
  return out;
}

// Shared triple-product accumulation over a grid with per-cell complex
// weights; the b == 0 case runs in plain complex arithmetic.
template <typename ValueAt>
LogComplex grid_transform(const std::array<std::complex<double>, 3>& c, Vec3 origin, double h,
                          const std::array<int, 3>& dims, double b, ValueAt&& value_at) {
  const double orig[3] = {origin.x, origin.y, origin.z};
  if (b == 0.0) {
    std::array<std::vector<std::complex<double>>, 3> g;
    for (int j = 0; j < 3; ++j) {
      auto lc = axis_cell_factors(c[j], orig[j], h, dims[j]);
      g[j].resize(lc.size());
      for (size_t i = 0; i < lc.size(); ++i) g[j][i] = lc[i].to_complex();
    }
    std::complex<double> acc(0.0, 0.0);
    for (int i1 = 0; i1 < dims[0]; ++i1)
      for (int i2 = 0; i2 < dims[1]; ++i2) {
        std::complex<double> g12 = g[0][i1] * g[1][i2];
        for (int i3 = 0; i3 < dims[2]; ++i3) {
          std::complex<double> q = value_at(i1, i2, i3);
          if (q != std::complex<double>(0.0, 0.0)) acc += q * g12 * g[2][i3];
        }
      }
    return LogComplex::from_complex(acc);
  }

  std::array<std::vector<LogComplex>, 3> g;
  for (int j = 0; j < 3; ++j) g[j] = axis_cell_factors(c[j], orig[j], h, dims[j]);
  // Accumulate against the largest per-cell logmag so the scaled sums stay
  // tame; LogAccumulator handles the renormalization.
  LogAccumulator acc;
  for (int i1 = 0; i1 < dims[0]; ++i1)
    for (int i2 = 0; i2 < dims[1]; ++i2) {
      LogComplex g12 = g[0][i1] * g[1][i2];
      for (int i3 = 0; i3 < dims[2]; ++i3) {
        std::complex<double> q = value_at(i1, i2, i3);
        if (q == std::complex<double>(0.0, 0.0)) continue;
        acc.add(g12 * g[2][i3] * LogComplex::from_complex(q));
      }
    }
  return acc.value();
}

}  // namespace

void validate(const PotentialSpec& q) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AnalyticPotential>) {
          validate(p.shape);
          if (p.profile && !std::holds_alternative<Ball>(p.shape))
            throw DomainError("radial profiles require a Ball shape");
          if (p.profile && !(p.profile->sigma > 0.0))
            throw DomainError("profile sigma must be > 0");
        } else {
          if (!(p.spacing > 0.0)) throw DomainError("voxel spacing must be > 0");
          if (p.dims[0] < 1 || p.dims[1] < 1 || p.dims[2] < 1)
            throw DomainError("voxel dims must be positive");
          if (p.values.size() != (size_t)p.dims[0] * p.dims[1] * p.dims[2])
            throw DomainError("voxel value count does not match dims");
          for (int i1 = 0; i1 < p.dims[0]; ++i1)
            for (int i2 = 0; i2 < p.dims[1]; ++i2)
              for (int i3 = 0; i3 < p.dims[2]; ++i3) {
                const bool boundary = i1 == 0 || i2 == 0 || i3 == 0 || i1 == p.dims[0] - 1 ||
                                      i2 == p.dims[1] - 1 || i3 == p.dims[2] - 1;
                if (boundary && p.values[p.index(i1, i2, i3)] != 0.0)
                  throw DomainError("voxel support must keep a zero-padding cell on each face");
              }
        }
      },
      q);
}

double FieldGrid::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

LogComplex translation_phase(const RealDirection& alpha, const VarietyDirection& beta, Vec3 t,
                             double k) {
  // i k (alpha - beta).t = i k (alpha.t - a w.t) + k b (v.t)
  const double logmag = k * beta.b() * dot(beta.v(), t);
  const double phase = k * (dot(alpha, t) - beta.a() * dot(beta.w(), t));
  return LogComplex::from_polar_log(logmag, phase);
}

LogComplex born_amplitude(const PotentialSpec& q, const RealDirection& alpha,
                          const VarietyDirection& beta, double k) {
  if (!(k > 0.0)) throw DomainError("born_amplitude: k must be > 0");
  validate(q);
  LogComplex integral = std::visit(
      [&](const auto& p) -> LogComplex {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AnalyticPotential>) {
          if (p.q0 == 0.0) return LogComplex::zero_value();
          if (p.profile) {
            return gaussian_ball_born(std::get<Ball>(p.shape), p.q0, *p.profile, alpha, beta, k);
          }
          return std::visit(
              [&](const auto& s) -> LogComplex {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Ball>) {
                  return ball_born(s, p.q0, alpha, beta, k);
                } else if constexpr (std::is_same_v<S, AxisBox>) {
                  return box_born(s, p.q0, alpha, beta, k);
                } else {
                  LogAccumulator acc;
                  for (const auto& b : s.balls) acc.add(ball_born(b, p.q0, alpha, beta, k));
                  return acc.value();
                }
              },
              p.shape);
        } else {
          auto c = axis_coefficients(&alpha, beta, k);
          return grid_transform(c, p.origin, p.spacing, p.dims, beta.b(),
                                [&](int i1, int i2, int i3) {
                                  return std::complex<double>(p.values[p.index(i1, i2, i3)], 0.0);
                                });
        }
      },
      q);
  if (integral.zero) return integral;
  return LogComplex::from_polar_log(integral.logmag - std::log(4.0 * M_PI),
                                    integral.phase + M_PI);
}

LogComplex amplitude_from_H(const FieldGrid& H, const VarietyDirection& beta, double k) {
  auto c = axis_coefficients(nullptr, beta, k);
  LogComplex integral =
      grid_transform(c, H.origin, H.spacing, H.dims, beta.b(),
                     [&](int i1, int i2, int i3) { return H.values[H.index(i1, i2, i3)]; });
  if (integral.zero) return integral;
  return LogComplex::from_polar_log(integral.logmag - std::log(4.0 * M_PI),
                                    integral.phase + M_PI);
}

VoxelPotential rasterize(const AnalyticPotential& q, double h) {
  validate(PotentialSpec{q});
  if (!(h > 0.0)) throw DomainError("rasterize: spacing must be > 0");
  auto [lo, hi] = bounding_box(q.shape);

  VoxelPotential grid;
  grid.spacing = h;
  grid.origin = lo - Vec3{2 * h, 2 * h, 2 * h};
  for (int j = 0; j < 3; ++j) {
    double span = (j == 0 ? hi.x - lo.x : j == 1 ? hi.y - lo.y : hi.z - lo.z);
    // round() keeps commensurate boxes exactly aligned to cell faces.
    int interior = std::max(1, (int)std::llround(std::ceil(span / h - 1e-9)));
    grid.dims[j] = interior + 4;
  }
  grid.values.assign((size_t)grid.dims[0] * grid.dims[1] * grid.dims[2], 0.0);

  const bool is_box = std::holds_alternative<AxisBox>(q.shape) && !q.profile;
  const int sub = 4;
  for (int i1 = 0; i1 < grid.dims[0]; ++i1)
    for (int i2 = 0; i2 < grid.dims[1]; ++i2)
      for (int i3 = 0; i3 < grid.dims[2]; ++i3) {
        Vec3 corner = grid.origin + Vec3{i1 * h, i2 * h, i3 * h};
        double val = 0.0;
        if (is_box) {
          const auto& box = std::get<AxisBox>(q.shape);
          double frac = 1.0;
          for (int j = 0; j < 3; ++j) {
            double c0 = corner[j], c1 = corner[j] + h;
            double b0 = box.lower[j], b1 = box.lower[j] + box.sides[j];
            double overlap = std::max(0.0, std::min(c1, b1) - std::max(c0, b0));
            frac *= overlap / h;
          }
          val = q.q0 * frac;
        } else {
          double sum = 0.0;
          for (int s1 = 0; s1 < sub; ++s1)
            for (int s2 = 0; s2 < sub; ++s2)
              for (int s3 = 0; s3 < sub; ++s3) {
                Vec3 p = corner + Vec3{(s1 + 0.5) * h / sub, (s2 + 0.5) * h / sub,
                                       (s3 + 0.5) * h / sub};
                if (!contains(q.shape, p)) continue;
                if (q.profile) {
                  const auto& ball = std::get<Ball>(q.shape);
                  Vec3 d = p - ball.center;
                  sum += std::exp(-dot(d, d) / (2.0 * q.profile->sigma * q.profile->sigma));
                } else {
                  sum += 1.0;
                }
              }
          val = q.q0 * sum / (sub * sub * sub);
        }
        grid.values[grid.index(i1, i2, i3)] = val;
      }
  return grid;
}

double default_grid_spacing(const AnalyticPotential& q, double k) {
  auto [lo, hi] = bounding_box(q.shape);
  double span = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  return std::min(span / 20.0, M_PI / (4.0 * k));
}

double voxel_support_extent(const VoxelPotential& q, const RealDirection& v) {
  double best = -std::numeric_limits<double>::infinity();
  const double h = q.spacing;
  for (int i1 = 0; i1 < q.dims[0]; ++i1)
    for (int i2 = 0; i2 < q.dims[1]; ++i2)
      for (int i3 = 0; i3 < q.dims[2]; ++i3) {
        if (q.values[q.index(i1, i2, i3)] == 0.0) continue;
        Vec3 corner = q.origin + Vec3{i1 * h, i2 * h, i3 * h};
        double e = 0.0;
        for (int j = 0; j < 3; ++j) e += v[j] * (corner[j] + (v[j] > 0.0 ? h : 0.0));
        best = std::max(best, e);
      }
  return best;
}

double voxel_support_volume(const VoxelPotential& q) {
  size_t n = 0;
  for (double v : q.values)
    if (v != 0.0) ++n;
  return (double)n * q.spacing * q.spacing * q.spacing;
}

double max_abs_value(const VoxelPotential& q) {
  double m = 0.0;
  for (double v : q.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace scatsize
