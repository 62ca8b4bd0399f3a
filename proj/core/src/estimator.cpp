#include "scatsize/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scatsize/errors.hpp"
#include "scatsize/quadrature.hpp"

namespace scatsize {

namespace {

bool is_obstacle_route(AmplitudeRoute r) {
  return r == AmplitudeRoute::MieSeries || r == AmplitudeRoute::SurfaceIntegral;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string to_string(AmplitudeRoute route) {
  switch (route) {
    case AmplitudeRoute::MieSeries: return "obstacle-series";
    case AmplitudeRoute::SurfaceIntegral: return "obstacle-surface";
    case AmplitudeRoute::Born: return "born";
    case AmplitudeRoute::LippmannSchwinger: return "lippmann-schwinger";
  }
  return "unknown";
}

double model_support_extent(const ScattererModel& model, const RealDirection& v) {
  if (model.sphere) {
    return dot(v, model.sphere->center) + model.sphere->radius;
  }
  if (!model.potential) throw DomainError("model has neither sphere nor potential");
  if (const auto* ap = std::get_if<AnalyticPotential>(&*model.potential))
    return support_extent(ap->shape, v);
  return voxel_support_extent(std::get<VoxelPotential>(*model.potential), v);
}

double model_envelope_constant(const ScattererModel& model, const RealDirection& alpha,
                               double k) {
  if (model.sphere) {
    SphereObstacle s = *model.sphere;
    s.k = k;
    const double c = max_normal_derivative(s, alpha) / (4.0 * M_PI);
    const double area = 4.0 * M_PI * s.radius * s.radius;
    return std::log(c * area);
  }
  if (!model.potential) throw DomainError("model has neither sphere nor potential");
  // Born bound |H| <= |q|.  Lippmann-Schwinger callers holding an LsSolution
  // should build the intercept from its max_abs_H instead.
  double maxq = 0.0, vol = 0.0;
  if (const auto* ap = std::get_if<AnalyticPotential>(&*model.potential)) {
    maxq = std::abs(ap->q0);
    vol = volume(ap->shape);
  } else {
    const auto& vp = std::get<VoxelPotential>(*model.potential);
    maxq = max_abs_value(vp);
    vol = voxel_support_volume(vp);
  }
  return std::log(maxq * vol / (4.0 * M_PI));
}

struct AmplitudeEvaluator::Impl {
  ScattererModel model;
  RealDirection alpha;
  double k;
  std::string source;
  std::vector<std::string> warnings;
  std::optional<LsSolution> ls;

  Impl(const ScattererModel& m, const RealDirection& a, double kk)
      : model(m), alpha(a), k(kk) {
    if (is_obstacle_route(m.route)) {
      if (!m.sphere) throw DomainError("obstacle route requires a sphere model");
      if (std::abs(m.sphere->k - kk) > 1e-12 * std::max(1.0, kk))
        throw DomainError("sphere wavenumber disagrees with the ladder wavenumber");
    } else {
      if (!m.potential) throw DomainError("potential route requires a potential model");
      if (const auto* ap = std::get_if<AnalyticPotential>(&*m.potential)) {
        const bool smooth = std::holds_alternative<Ball>(ap->shape);
        if (!smooth) warnings.push_back("nonsmooth-support");
      }
      if (m.route == AmplitudeRoute::LippmannSchwinger)
        ls = solve_lippmann_schwinger(*m.potential, a, kk, m.ls);
    }
    source = to_string(m.route);
  }

  LogComplex eval(const VarietyDirection& beta) const {
    switch (model.route) {
      case AmplitudeRoute::MieSeries: {
        SphereObstacle centered = *model.sphere;
        centered.center = {0, 0, 0};
        LogComplex a0 = sphere_amplitude(centered, beta.dot_real(alpha));
        return a0 * translation_phase(alpha, beta, model.sphere->center, k);
      }
      case AmplitudeRoute::SurfaceIntegral:
        return amplitude_via_surface_integral(*model.sphere, alpha, beta);
      case AmplitudeRoute::Born:
        return born_amplitude(*model.potential, alpha, beta, k);
      case AmplitudeRoute::LippmannSchwinger:
        return amplitude_from_H(ls->H, beta, k);
    }
    throw DomainError("unknown amplitude route");
  }
};

AmplitudeEvaluator::AmplitudeEvaluator(const ScattererModel& model, const RealDirection& alpha,
                                       double k)
    : impl_(std::make_unique<Impl>(model, alpha, k)) {}
AmplitudeEvaluator::~AmplitudeEvaluator() = default;
AmplitudeEvaluator::AmplitudeEvaluator(AmplitudeEvaluator&&) noexcept = default;

LogComplex AmplitudeEvaluator::operator()(const VarietyDirection& beta) const {
  return impl_->eval(beta);
}
const std::string& AmplitudeEvaluator::source() const { return impl_->source; }
const std::vector<std::string>& AmplitudeEvaluator::model_warnings() const {
  return impl_->warnings;
}
const LsSolution* AmplitudeEvaluator::ls_solution() const {
  return impl_->ls ? &*impl_->ls : nullptr;
}

AmplitudeLadder compute_ladder(const AmplitudeEvaluator& eval, const RealDirection& alpha,
                               const RealDirection& w, const RealDirection& v,
                               const std::vector<double>& b_grid, double k) {
  if (b_grid.empty()) throw DomainError("compute_ladder: empty b grid");
  for (size_t i = 0; i < b_grid.size(); ++i) {
    if (!(b_grid[i] > 0.0)) throw DomainError("compute_ladder: b grid must be positive");
    if (i > 0 && !(b_grid[i] > b_grid[i - 1]))
      throw DomainError("compute_ladder: b grid must be strictly increasing");
  }

  AmplitudeLadder ladder;
  ladder.k = k;
  ladder.alpha = alpha;
  ladder.w = w;
  ladder.v = v;
  ladder.b_grid = b_grid;
  ladder.source = eval.source();
  ladder.warnings = eval.model_warnings();
  if (std::abs(dot(v, alpha)) < 1e-8)
    ladder.warnings.push_back("alpha-orthogonal-to-Im-beta");

  ladder.logmag.reserve(b_grid.size());
  for (double b : b_grid) {
    VarietyDirection beta = make_variety_direction(w, v, b);
    LogComplex A = eval(beta);
    if (A.zero) throw ZeroAmplitudeError("compute_ladder: amplitude is exactly zero");
    ladder.logmag.push_back(A.logmag);
  }
  return ladder;
}

AmplitudeLadder compute_ladder(const ScattererModel& model, const RealDirection& alpha,
                               const RealDirection& w, const RealDirection& v,
                               const std::vector<double>& b_grid, double k) {
  AmplitudeEvaluator eval(model, alpha, k);
  return compute_ladder(eval, alpha, w, v, b_grid, k);
}

SizeEstimate fit_extent(const AmplitudeLadder& ladder) {
  const size_t n = ladder.b_grid.size();
  if (n < 3) throw TooFewPointsError("fit_extent: need at least 3 rungs");

  // Least squares with columns [b, ln b, 1] via the 3x3 normal equations
  // solved by Cramer's rule (well conditioned at these grid sizes).
  double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (size_t i = 0; i < n; ++i) {
    const double row[3] = {ladder.b_grid[i], std::log(ladder.b_grid[i]), 1.0};
    for (int p = 0; p < 3; ++p) {
      rhs[p] += row[p] * ladder.logmag[i];
      for (int q = 0; q < 3; ++q) M[p][q] += row[p] * row[q];
    }
  }
  auto det3 = [](const double A[3][3]) {
    return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
           A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
           A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  };
  const double det = det3(M);
  if (det == 0.0) throw DomainError("fit_extent: singular normal equations");
  double coef[3];
  for (int c = 0; c < 3; ++c) {
    double A[3][3];
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) A[p][q] = q == c ? rhs[p] : M[p][q];
    coef[c] = det3(A) / det;
  }

  SizeEstimate est;
  est.slope = coef[0];
  est.log_coeff = coef[1];
  est.intercept = coef[2];
  est.d_hat = coef[0] / ladder.k;
  est.warnings = ladder.warnings;

  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double pred =
        coef[0] * ladder.b_grid[i] + coef[1] * std::log(ladder.b_grid[i]) + coef[2];
    ss += (pred - ladder.logmag[i]) * (pred - ladder.logmag[i]);
  }
  est.residual_rms = std::sqrt(ss / n);

  est.pairwise_slopes.reserve(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    est.pairwise_slopes.push_back((ladder.logmag[i + 1] - ladder.logmag[i]) /
                                  (ladder.k * (ladder.b_grid[i + 1] - ladder.b_grid[i])));
  }
  est.pairwise_median = median(est.pairwise_slopes);

  // Slope coherence over the top half of the grid.
  const size_t half = est.pairwise_slopes.size() / 2;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (size_t i = half; i < est.pairwise_slopes.size(); ++i) {
    lo = std::min(lo, est.pairwise_slopes[i]);
    hi = std::max(hi, est.pairwise_slopes[i]);
  }
  const double scale = std::max({std::abs(lo), std::abs(hi), 1e-30});
  if ((hi - lo) / scale > 0.10) est.warnings.push_back("nonmonotone-slopes");
  return est;
}

WidthEstimate estimate_width(const AmplitudeEvaluator& eval, const RealDirection& alpha,
                             const RealDirection& w, const RealDirection& v,
                             const std::vector<double>& b_grid, double k) {
  WidthEstimate out;
  out.plus = fit_extent(compute_ladder(eval, alpha, w, v, b_grid, k));
  out.minus = fit_extent(compute_ladder(eval, alpha, w, -v, b_grid, k));
  out.width_hat = out.plus.d_hat + out.minus.d_hat;
  return out;
}

WidthEstimate estimate_width(const ScattererModel& model, const RealDirection& alpha,
                             const RealDirection& w, const RealDirection& v,
                             const std::vector<double>& b_grid, double k) {
  AmplitudeEvaluator eval(model, alpha, k);
  return estimate_width(eval, alpha, w, v, b_grid, k);
}

double surface_growth_oracle(const ShapeSpec& shape, const RealDirection& v, double b, double k) {
  if (!(b > 0.0)) throw DomainError("surface_growth_oracle: b must be > 0");
  if (!(k > 0.0)) throw DomainError("surface_growth_oracle: k must be > 0");
  validate(shape);

  if (const auto* ball = std::get_if<Ball>(&shape)) {
    // oint e^{bk s.v} ds = 4 pi R sinh(bkR)/(bk) around the center offset:
    // ln = bkR + ln(2 pi R/(bk)) + log1p(-e^{-2bkR}) + bk v.c.
    const double x = b * k * ball->radius;
    return x + std::log(2.0 * M_PI * ball->radius / (b * k)) + std::log1p(-std::exp(-2.0 * x)) +
           b * k * dot(v, ball->center);
  }
  const auto* un = std::get_if<UnionOfBalls>(&shape);
  if (!un) throw DomainError("surface_growth_oracle: shape must be a Ball or UnionOfBalls");

  // Masked surface quadrature over each sphere, log-scaled by the global
  // supremum of b k s.v; nodes buried inside another ball are skipped so
  // overlapping unions integrate over the actual boundary.
  const double peak = b * k * support_extent(shape, v);
  double acc = 0.0;
  for (size_t bi = 0; bi < un->balls.size(); ++bi) {
    const Ball& ball = un->balls[bi];
    const int n_polar = std::max(48, (int)std::ceil(0.75 * b * k * ball.radius) + 20);
    SphereRule rule = sphere_rule(v, n_polar, 2 * n_polar);
    for (size_t i = 0; i < rule.points.size(); ++i) {
      const Vec3 s = ball.center + ball.radius * rule.points[i];
      bool buried = false;
      for (size_t bj = 0; bj < un->balls.size() && !buried; ++bj) {
        if (bj == bi) continue;
        const Vec3 d = s - un->balls[bj].center;
        buried = dot(d, d) < un->balls[bj].radius * un->balls[bj].radius * (1.0 - 1e-12);
      }
      if (buried) continue;
      acc += rule.weights[i] * ball.radius * ball.radius *
             std::exp(b * k * dot(v, s) - peak);
    }
  }
  if (!(acc > 0.0)) throw DomainError("surface_growth_oracle: quadrature collapsed to zero");
  return peak + std::log(acc);
}

std::vector<double> default_b_grid(double k, double extent_scale) {
  double bmax = 36.0, bmin = 6.0;
  const double load = k * bmax * std::max(extent_scale, 1e-12);
  if (load > 700.0) {
    bmax = 700.0 / (k * extent_scale);
    bmin = bmax / 6.0;
  }
  return log_b_grid(bmin, bmax, 12);
}

std::vector<double> linear_b_grid(double bmin, double bmax, int count) {
  if (count < 1 || !(bmax > bmin) || !(bmin > 0.0))
    throw DomainError("invalid b grid parameters");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = count == 1 ? bmin : bmin + (bmax - bmin) * i / (count - 1);
  return out;
}

std::vector<double> log_b_grid(double bmin, double bmax, int count) {
  if (count < 1 || !(bmax > bmin) || !(bmin > 0.0))
    throw DomainError("invalid b grid parameters");
  std::vector<double> out(count);
  const double l0 = std::log(bmin), l1 = std::log(bmax);
  for (int i = 0; i < count; ++i)
    out[i] = count == 1 ? bmin : std::exp(l0 + (l1 - l0) * i / (count - 1));
  return out;
}

}  // namespace scatsize
