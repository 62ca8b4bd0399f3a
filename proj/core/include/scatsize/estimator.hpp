#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scatsize/geometry.hpp"
#include "scatsize/lippmann_schwinger.hpp"
#include "scatsize/obstacle.hpp"
#include "scatsize/potential.hpp"

namespace scatsize {

enum class AmplitudeRoute {
  MieSeries,        // obstacle, partial-wave series (default)
  SurfaceIntegral,  // obstacle, boundary-integral quadrature
  Born,             // potential, first Born approximation
  LippmannSchwinger // potential, full volume solve
};

std::string to_string(AmplitudeRoute route);

/// What the ladder is built over: a Dirichlet sphere or a potential, plus the
/// forward route that synthesizes amplitudes.
struct ScattererModel {
  std::optional<SphereObstacle> sphere;
  std::optional<PotentialSpec> potential;
  AmplitudeRoute route = AmplitudeRoute::Born;
  LsOptions ls;

  static ScattererModel obstacle(SphereObstacle s,
                                 AmplitudeRoute r = AmplitudeRoute::MieSeries) {
    ScattererModel m;
    m.sphere = s;
    m.route = r;
    return m;
  }
  static ScattererModel born(PotentialSpec q) {
    ScattererModel m;
    m.potential = std::move(q);
    m.route = AmplitudeRoute::Born;
    return m;
  }
  static ScattererModel lippmann_schwinger(PotentialSpec q, LsOptions opt = {}) {
    ScattererModel m;
    m.potential = std::move(q);
    m.route = AmplitudeRoute::LippmannSchwinger;
    m.ls = opt;
    return m;
  }
};

/// Ground-truth support extent of the model in direction v, where one exists
/// (spheres and analytic potentials; voxel grids report the staircase
/// support).
double model_support_extent(const ScattererModel& model, const RealDirection& v);

/// ln(c * measure / 4pi) with c the relevant boundedness constant: the growth
/// envelope intercept ln|A| <= envelope + k b h(v).
double model_envelope_constant(const ScattererModel& model, const RealDirection& alpha, double k);

struct AmplitudeLadder {
  double k = 0.0;
  RealDirection alpha = e1();
  RealDirection w = e1();
  RealDirection v = e2();
  std::vector<double> b_grid;
  std::vector<double> logmag;  // ln|A(beta(b), alpha)|
  std::string source;          // forward route tag
  std::vector<std::string> warnings;
};

struct SizeEstimate {
  double d_hat = 0.0;       // slope / k
  double slope = 0.0;       // coefficient of b
  double log_coeff = 0.0;   // coefficient of ln b
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::vector<double> pairwise_slopes;
  double pairwise_median = 0.0;
  std::vector<std::string> warnings;
};

/// Amplitude source bound to one (model, alpha, k) triple.  For the
/// Lippmann-Schwinger route the H field is solved once at construction and
/// reused for every beta (H does not depend on beta).
class AmplitudeEvaluator {
 public:
  AmplitudeEvaluator(const ScattererModel& model, const RealDirection& alpha, double k);
  ~AmplitudeEvaluator();
  AmplitudeEvaluator(AmplitudeEvaluator&&) noexcept;

  LogComplex operator()(const VarietyDirection& beta) const;
  const std::string& source() const;
  const std::vector<std::string>& model_warnings() const;
  const LsSolution* ls_solution() const;  // null unless the LS route

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sample ln|A(beta(b), alpha)| over the b-grid.  Emits the
/// "alpha-orthogonal-to-Im-beta" warning when |v.alpha| < 1e-8 and rejects
/// ladders with an exactly-zero rung.
AmplitudeLadder compute_ladder(const ScattererModel& model, const RealDirection& alpha,
                               const RealDirection& w, const RealDirection& v,
                               const std::vector<double>& b_grid, double k);

/// As above, reusing an existing evaluator (so one H solve can feed many
/// ladders).
AmplitudeLadder compute_ladder(const AmplitudeEvaluator& eval, const RealDirection& alpha,
                               const RealDirection& w, const RealDirection& v,
                               const std::vector<double>& b_grid, double k);

/// Least-squares fit logmag(b) ~ (k d) b + s ln b + C; the ln b term absorbs
/// the algebraic prefactor of the boundary Laplace asymptotics.  Also
/// reports consecutive pairwise slopes and their median, and warns
/// ("nonmonotone-slopes") when the top-half slopes spread by more than 10%.
SizeEstimate fit_extent(const AmplitudeLadder& ladder);

struct WidthEstimate {
  double width_hat = 0.0;
  SizeEstimate plus;   // direction v
  SizeEstimate minus;  // direction -v
};

WidthEstimate estimate_width(const ScattererModel& model, const RealDirection& alpha,
                             const RealDirection& w, const RealDirection& v,
                             const std::vector<double>& b_grid, double k);

/// Evaluator-reusing variant; one Lippmann-Schwinger solve can feed whole
/// direction sweeps this way.
WidthEstimate estimate_width(const AmplitudeEvaluator& eval, const RealDirection& alpha,
                             const RealDirection& w, const RealDirection& v,
                             const std::vector<double>& b_grid, double k);

/// ln oint_S e^{b k s.v} ds for Ball / UnionOfBalls: closed form
/// 4 pi R sinh(bkR)/(bk) (times the e^{bk v.c} offset) for one ball,
/// log-scaled masked surface quadrature for unions.
double surface_growth_oracle(const ShapeSpec& shape, const RealDirection& v, double b, double k);

/// 12 log-spaced points in [6, 36], shrunk when k * extent would push
/// k*b*extent past 700 log units.
std::vector<double> default_b_grid(double k, double extent_scale);

/// Evenly spaced b-grid helper used by the CLI.
std::vector<double> linear_b_grid(double bmin, double bmax, int count);
std::vector<double> log_b_grid(double bmin, double bmax, int count);

}  // namespace scatsize
