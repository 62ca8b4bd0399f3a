#include "scatsize/selftest.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "scatsize/estimator.hpp"
#include "scatsize/obstacle.hpp"
#include "scatsize/potential.hpp"

namespace scatsize {

namespace {

SelfTestResult check_unitarity(double perturbation) {
  SphereObstacle sphere{1.0, {0, 0, 0}, 3.0};
  MieCoefficients mie = mie_coefficients(sphere, 40);
  if (perturbation != 0.0 && mie.T.size() > 5) mie.T[5] *= (1.0 + perturbation);
  double worst = 0.0;
  for (const auto& T : mie.T) {
    if (std::abs(T) <= 1e-300) continue;
    worst = std::max(worst, std::abs(std::abs(1.0 + 2.0 * T) - 1.0));
  }
  std::ostringstream os;
  os << "max | |1+2T_l| - 1 | = " << worst << " (tol 1e-12)";
  return {"mie-unitarity", worst <= 1e-12, os.str()};
}

SelfTestResult check_optical_theorem() {
  SphereObstacle sphere{1.0, {0, 0, 0}, 3.0};
  LogComplex A1 = sphere_amplitude(sphere, std::complex<double>(1.0, 0.0));
  const double lhs = 4.0 * M_PI / sphere.k * A1.abs() * std::sin(A1.phase);
  MieCoefficients mie = mie_coefficients(sphere, 60);
  double sum = 0.0;
  for (size_t l = 0; l < mie.T.size(); ++l) sum += (2.0 * l + 1.0) * std::norm(mie.T[l]);
  const double rhs = 4.0 * M_PI / (sphere.k * sphere.k) * sum;
  const double rel = std::abs(lhs - rhs) / std::abs(rhs);
  std::ostringstream os;
  os << "(4pi/k) Im A(1) vs (4pi/k^2) sum (2l+1)|T|^2: rel = " << rel << " (tol 1e-12)";
  return {"optical-theorem", rel <= 1e-12, os.str()};
}

SelfTestResult check_cross_representation() {
  RealDirection alpha(0.6, 0.8, 0.0);
  double worst0 = 0.0, worst5 = 0.0;
  for (double k : {1.0, 3.0, 6.0}) {
    SphereObstacle sphere{1.0, {0, 0, 0}, k};
    for (double b : {0.0, 5.0}) {
      VarietyDirection beta = make_variety_direction(e1(), e2(), b);
      LogComplex series = sphere_amplitude(sphere, beta.dot_real(alpha));
      LogComplex surf = amplitude_via_surface_integral(sphere, alpha, beta);
      const double dlog =
          std::abs(series.logmag - surf.logmag) / std::max(1.0, std::abs(series.logmag));
      if (b == 0.0)
        worst0 = std::max(worst0, dlog);
      else
        worst5 = std::max(worst5, dlog);
    }
  }
  std::ostringstream os;
  os << "logmag rel diff: b=0 " << worst0 << " (tol 1e-10), b=5 " << worst5 << " (tol 1e-4)";
  return {"cross-representation", worst0 <= 1e-10 && worst5 <= 1e-4, os.str()};
}

SelfTestResult check_surface_oracle() {
  const double got = surface_growth_oracle(Ball{{0, 0, 0}, 1.0}, e2(), 30.0, 1.0) / 30.0;
  const double want = 0.94788932282490634;
  const double err = std::abs(got - want);
  std::ostringstream os;
  os << "ln J/(bk) at R=1,k=1,b=30 = " << got << " vs " << want << " (tol 1e-9)";
  return {"surface-oracle", err <= 1e-9, os.str()};
}

SelfTestResult check_translation_covariance() {
  const double k = 4.0;
  RealDirection alpha(0.6, 0.8, 0.0);
  const Vec3 shift{0.15, -0.4, 0.25};
  AnalyticPotential base{Ball{{0.0, 0.2, -0.1}, 0.8}, 1.0, std::nullopt};
  AnalyticPotential moved{translated(base.shape, shift), 1.0, std::nullopt};
  double worst = 0.0;
  for (double b : {2.0, 8.0, 20.0}) {
    VarietyDirection beta = make_variety_direction(e1(), e2(), b);
    LogComplex a0 = born_amplitude(PotentialSpec{base}, alpha, beta, k);
    LogComplex a1 = born_amplitude(PotentialSpec{moved}, alpha, beta, k);
    LogComplex predicted = a0 * translation_phase(alpha, beta, shift, k);
    worst = std::max(worst, std::abs(predicted.logmag - a1.logmag));
    worst = std::max(worst,
                     std::abs(LogComplex::wrap_phase(predicted.phase - a1.phase)));
  }
  std::ostringstream os;
  os << "max |log A(shifted) - log(phase*A)| = " << worst << " (tol 1e-8)";
  return {"translation-covariance", worst <= 1e-8, os.str()};
}

}  // namespace

std::vector<SelfTestResult> run_selftest(const SelfTestOptions& options) {
  std::vector<SelfTestResult> out;
  out.push_back(check_unitarity(options.mie_perturbation));
  out.push_back(check_optical_theorem());
  out.push_back(check_cross_representation());
  out.push_back(check_surface_oracle());
  out.push_back(check_translation_covariance());
  return out;
}

int run_selftest_cli(const SelfTestOptions& options, std::ostream& out) {
  auto results = run_selftest(options);
  bool all = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace scatsize
