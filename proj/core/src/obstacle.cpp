#include "scatsize/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scatsize/errors.hpp"
#include "scatsize/quadrature.hpp"
#include "scatsize/special_functions.hpp"

namespace scatsize {

namespace {

constexpr int kSeriesCap = 5000;
constexpr double kLogRelTermTol = -36.841361487904734;  // ln(1e-16)
constexpr int kQuietTerms = 10;

void check_sphere(const SphereObstacle& s) {
  if (!(s.radius > 0.0)) throw DomainError("sphere radius must be > 0");
  if (!(s.k > 0.0)) throw DomainError("wavenumber must be > 0");
}

std::complex<double> ipow(int l) {
  switch (l & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct MieLogData {
  std::vector<LogComplex> T_log;
  std::vector<LogComplex> inv_h_log;  // 1/h^(1)_l
};

// T_l = -j/(j + i y) and 1/h_l from log-domain j and y; no order
// under/overflows on the way.
MieLogData mie_log_data(double x, int lmax) {
  auto jl = spherical_bessel_j_log(lmax, x);
  auto yl = spherical_bessel_y_log(lmax, x);
  MieLogData out;
  out.T_log.resize(lmax + 1);
  out.inv_h_log.resize(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    const LogReal j = jl[l];
    const LogReal y = yl[l];
    const double lj = j.sign == 0 ? -std::numeric_limits<double>::infinity() : j.logmag;
    const double ly = y.sign == 0 ? -std::numeric_limits<double>::infinity() : y.logmag;
    const double lm = std::max(lj, ly);
    const double re = j.sign == 0 ? 0.0 : j.sign * std::exp(lj - lm);
    const double im = y.sign == 0 ? 0.0 : y.sign * std::exp(ly - lm);
    const double habs_log = lm + 0.5 * std::log(re * re + im * im);
    const double hphase = std::atan2(im, re);
    out.inv_h_log[l] = LogComplex::from_polar_log(-habs_log, -hphase);
    if (j.sign == 0) {
      out.T_log[l] = LogComplex::zero_value();
    } else {
      const double jphase = j.sign > 0 ? 0.0 : M_PI;
      out.T_log[l] = LogComplex::from_polar_log(lj - habs_log, M_PI + jphase - hphase);
    }
  }
  return out;
}

// Cached series machinery for u_N on the surface: coefficients
// c_l = (2l+1) i^l / h_l(kR), evaluated against P_l(alpha.s_hat).
class NormalDerivativeSeries {
 public:
  NormalDerivativeSeries(const SphereObstacle& sphere) : sphere_(sphere) {
    const double x = sphere.k * sphere.radius;
    // 1/h_l decays like j_l once l >> kR; this margin leaves the tail far
    // below machine precision of the head.
    lmax_ = (int)std::ceil(x + 14.0 * std::cbrt(x + 1.0) + 40.0);
    auto data = mie_log_data(x, lmax_);
    coeff_.resize(lmax_ + 1);
    for (int l = 0; l <= lmax_; ++l)
      coeff_[l] = (2.0 * l + 1.0) * ipow(l) * data.inv_h_log[l].to_complex();
    prefac_ = std::complex<double>(0.0, -1.0) / (sphere.k * sphere.radius * sphere.radius);
  }

  // u_N for the origin-centered sphere at surface direction cosine mu.
  std::complex<double> eval_centered(double mu) const {
    std::complex<double> sum = coeff_[0];
    double p0 = 1.0, p1 = mu;
    if (lmax_ >= 1) sum += coeff_[1] * mu;
    for (int l = 2; l <= lmax_; ++l) {
      const int m = l - 1;
      const double p2 = ((2.0 * m + 1.0) * mu * p1 - m * p0) / (m + 1);
      p0 = p1;
      p1 = p2;
      sum += coeff_[l] * p2;
    }
    return prefac_ * sum;
  }

  // Translation covariance: u_N at s on the actual (possibly off-center)
  // sphere picks up the incident phase at the center.
  std::complex<double> eval(const RealDirection& alpha, Vec3 shat) const {
    const double mu = dot(alpha.vec(), shat);
    const double kac = sphere_.k * dot(alpha.vec(), sphere_.center);
    return eval_centered(mu) * std::polar(1.0, kac);
  }

 private:
  SphereObstacle sphere_;
  int lmax_ = 0;
  std::vector<std::complex<double>> coeff_;
  std::complex<double> prefac_;
};

}  // namespace

int surface_quadrature_polar_order(double k, double b, double radius) {
  return std::max(24, 2 * (int)std::ceil(k * (1.0 + b) * radius) + 12);
}

MieCoefficients mie_coefficients(const SphereObstacle& sphere, int lmax) {
  check_sphere(sphere);
  if (lmax < 0) throw DomainError("mie_coefficients: lmax must be >= 0");
  auto data = mie_log_data(sphere.k * sphere.radius, lmax);
  MieCoefficients out;
  out.k = sphere.k;
  out.radius = sphere.radius;
  out.T_log = std::move(data.T_log);
  out.T.resize(lmax + 1);
  for (int l = 0; l <= lmax; ++l) out.T[l] = out.T_log[l].to_complex();
  return out;
}

LogComplex sphere_amplitude(const SphereObstacle& sphere, std::complex<double> t) {
  check_sphere(sphere);
  const double x = sphere.k * sphere.radius;
  const int lmin = (int)std::ceil(x) + 10;

  LogAccumulator acc;
  int quiet = 0;
  int have = -1;
  std::vector<LogComplex> T_log;

  // P_l(t) streamed in scaled form alongside the sum.
  std::complex<double> pa(1.0, 0.0);  // P_{l-1}, scaled
  std::complex<double> pb(1.0, 0.0);  // P_l, scaled
  double poff = 0.0;

  for (int l = 0; l <= kSeriesCap; ++l) {
    if (l > have) {
      const int request = std::min(kSeriesCap, std::max(2 * (have + 1), lmin + 64));
      T_log = mie_log_data(x, request).T_log;
      have = request;
    }
    if (l == 1) {
      pa = pb;
      pb = t;
    } else if (l >= 2) {
      const int m = l - 1;
      std::complex<double> pn = ((2.0 * m + 1.0) * t * pb - (double)m * pa) / (double)(m + 1);
      pa = pb;
      pb = pn;
      const double mm = std::max(std::abs(pa), std::abs(pb));
      if (mm > 1e100) {
        pa /= mm;
        pb /= mm;
        poff += std::log(mm);
      }
    }
    LogComplex P = pb == std::complex<double>(0.0, 0.0)
                       ? LogComplex::zero_value()
                       : LogComplex::from_polar_log(std::log(std::abs(pb)) + poff, std::arg(pb));
    LogComplex term = LogComplex::from_real(2.0 * l + 1.0) * T_log[l] * P;
    acc.add(term);
    if (l >= lmin) {
      const double sum_log = acc.current_logmag();
      const bool negligible =
          term.zero || (std::isfinite(sum_log) && term.logmag < sum_log + kLogRelTermTol);
      quiet = negligible ? quiet + 1 : 0;
      if (quiet >= kQuietTerms) return acc.value() / std::complex<double>(0.0, sphere.k);
    }
  }
  throw NoConvergenceError("sphere_amplitude: series did not settle by l = 5000");
}

std::complex<double> sphere_normal_derivative(const SphereObstacle& sphere,
                                              const RealDirection& alpha, Vec3 s) {
  check_sphere(sphere);
  const Vec3 rel = s - sphere.center;
  const double r = norm(rel);
  if (std::abs(r - sphere.radius) > 1e-9 * sphere.radius)
    throw OffSurfaceError("sphere_normal_derivative: point is not on the surface");
  NormalDerivativeSeries series(sphere);
  return series.eval(alpha, (1.0 / r) * rel);
}

LogComplex amplitude_via_surface_integral(const SphereObstacle& sphere, const RealDirection& alpha,
                                          const VarietyDirection& beta) {
  check_sphere(sphere);
  const double R = sphere.radius;
  const double k = sphere.k;
  const double b = beta.b();
  const double a = beta.a();

  const int n_polar = surface_quadrature_polar_order(k, b, R);
  const int n_azimuth = 2 * n_polar;
  SphereRule rule = sphere_rule(beta.v(), n_polar, n_azimuth);
  NormalDerivativeSeries series(sphere);

  const double vc = dot(beta.v(), sphere.center);
  const double scale_log = k * b * (vc + R);  // e^{k b (v.c + R)} factored out

  std::complex<double> acc(0.0, 0.0);
  for (size_t i = 0; i < rule.points.size(); ++i) {
    const Vec3 shat = rule.points[i];
    const Vec3 s = sphere.center + R * shat;
    const std::complex<double> uN = series.eval(alpha, shat);
    const double ws = dot(beta.w(), s);
    const double vs = dot(beta.v(), s);
    // e^{-ik beta.s} = e^{k b v.s} e^{-i k a w.s}, scaled down by the peak.
    acc += rule.weights[i] * std::exp(k * b * (vs - vc - R)) * std::polar(1.0, -k * a * ws) * uN;
  }
  acc *= R * R;
  if (acc == std::complex<double>(0.0, 0.0)) return LogComplex::zero_value();
  LogComplex out = LogComplex::from_complex(acc);
  return LogComplex::from_polar_log(out.logmag + scale_log - std::log(4.0 * M_PI),
                                    out.phase + M_PI);  // leading -(1/4pi)
}

std::complex<double> scattered_field(const SphereObstacle& sphere, const RealDirection& alpha,
                                     Vec3 x) {
  check_sphere(sphere);
  const Vec3 rel = x - sphere.center;
  const double r = norm(rel);
  if (r <= sphere.radius) throw InsideObstacleError("scattered_field: x is inside the obstacle");

  const double R = sphere.radius;
  const double k = sphere.k;
  int n_polar = std::max(48, 2 * (int)std::ceil(k * R) + 24);
  if (r < 2.0 * R) n_polar *= 2;
  const int n_azimuth = 2 * n_polar;

  // Pole toward x, and Gauss-Legendre in theta itself rather than cos(theta):
  // near the surface the sin(theta) Jacobian cancels the 1/|x-s| kernel peak
  // (sin(theta)/|x-s| -> cos(theta/2)/R as x -> S), keeping the integrand
  // smooth all the way to the boundary.
  const RealDirection pole = RealDirection::normalized(rel);
  auto [t1, t2] = orthonormal_complement(pole);
  GaussLegendre gl = gauss_legendre(n_polar);
  NormalDerivativeSeries series(sphere);

  std::complex<double> acc(0.0, 0.0);
  const double dphi = 2.0 * M_PI / n_azimuth;
  for (int i = 0; i < n_polar; ++i) {
    const double theta = 0.5 * M_PI * (gl.nodes[i] + 1.0);
    const double wt = 0.5 * M_PI * gl.weights[i] * std::sin(theta) * dphi;
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = dphi * j;
      const Vec3 shat =
          ct * pole.vec() + (st * std::cos(phi)) * t1 + (st * std::sin(phi)) * t2;
      const Vec3 s = sphere.center + R * shat;
      const double dist = norm(x - s);
      const std::complex<double> g = std::polar(1.0, k * dist) / (4.0 * M_PI * dist);
      acc += wt * g * series.eval(alpha, shat);
    }
  }
  acc *= R * R;
  return std::polar(1.0, k * dot(alpha.vec(), x)) - acc;
}

double max_normal_derivative(const SphereObstacle& sphere, const RealDirection& alpha) {
  check_sphere(sphere);
  NormalDerivativeSeries series(sphere);
  // u_N depends on alpha.s_hat only; scanning one meridian covers all values.
  double best = 0.0;
  const int n = 512;
  auto [t1, t2] = orthonormal_complement(alpha);
  (void)t2;
  for (int i = 0; i <= n; ++i) {
    const double th = M_PI * i / n;
    const Vec3 shat = std::cos(th) * alpha.vec() + std::sin(th) * t1;
    best = std::max(best, std::abs(series.eval(alpha, shat)));
  }
  return best;
}

}  // namespace scatsize
