#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "scatsize/obstacle.hpp"
#include "scatsize/potential.hpp"
#include "test_util.hpp"

using namespace scatsize;
using scatsize::testutil::random_direction;

namespace {
double im_part(const LogComplex& a) { return a.abs() * std::sin(a.phase); }
}  // namespace

TEST_CASE("mie coefficients") {
  SUBCASE("T_0 vanishes at kR = pi") {
    MieCoefficients mie = mie_coefficients(SphereObstacle{1.0, {0, 0, 0}, M_PI}, 4);
    CHECK(std::abs(mie.T[0]) < 1e-14);
  }
  SUBCASE("|T_0| = sin(1) at kR = 1") {
    MieCoefficients mie = mie_coefficients(SphereObstacle{1.0, {0, 0, 0}, 1.0}, 4);
    CHECK(std::abs(mie.T[0]) == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
  }
  SUBCASE("T_30 at kR = 1 is deep in the decay regime") {
    MieCoefficients mie = mie_coefficients(SphereObstacle{1.0, {0, 0, 0}, 1.0}, 30);
    CHECK(std::abs(mie.T[30]) < 1e-40);
    // mpmath: ln|T_30(1)| = -190.47833049431266624
    CHECK(mie.T_log[30].logmag == doctest::Approx(-190.47833049431267).epsilon(1e-10));
  }
  SUBCASE("unitarity |1 + 2 T_l| = 1, and |T_l| <= 1") {
    for (double kr : {0.5, 1.0, 3.0, 6.0, 11.0}) {
      MieCoefficients mie = mie_coefficients(SphereObstacle{1.0, {0, 0, 0}, kr}, 60);
      for (const auto& T : mie.T) {
        CHECK(std::abs(T) <= 1.0 + 1e-14);
        if (std::abs(T) > 1e-300) CHECK(std::abs(std::abs(1.0 + 2.0 * T) - 1.0) < 1e-12);
      }
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(mie_coefficients(SphereObstacle{0.0, {0, 0, 0}, 1.0}, 4), DomainError);
    CHECK_THROWS_AS(mie_coefficients(SphereObstacle{1.0, {0, 0, 0}, -1.0}, 4), DomainError);
  }
}

TEST_CASE("optical theorem on the real sphere") {
  for (double k : {1.0, 3.0, 6.0}) {
    SphereObstacle sph{1.0, {0, 0, 0}, k};
    LogComplex A1 = sphere_amplitude(sph, {1.0, 0.0});
    CHECK(im_part(A1) >= 0.0);
    MieCoefficients mie = mie_coefficients(sph, 80);
    double sum = 0.0;
    for (size_t l = 0; l < mie.T.size(); ++l) sum += (2.0 * l + 1.0) * std::norm(mie.T[l]);
    const double lhs = 4.0 * M_PI / k * im_part(A1);
    const double rhs = 4.0 * M_PI / (k * k) * sum;
    CHECK(std::abs(lhs - rhs) / rhs < 1e-12);
  }
}

TEST_CASE("series amplitude against the 50-digit oracle") {
  SUBCASE("k=3, b=5") {
    // alpha=(.6,.8,0), w=e1, v=e2: t = sqrt(26)*0.6 + 4i
    SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
    const std::complex<double> t(std::sqrt(26.0) * 0.6, 4.0);
    LogComplex A = sphere_amplitude(sph, t);
    CHECK(A.logmag == doctest::Approx(6.8379121602241029).epsilon(1e-12));
    CHECK(A.phase == doctest::Approx(1.6713072408376526).epsilon(1e-10));
  }
  SUBCASE("k=6, b=36 (deep continuation)") {
    SphereObstacle sph{1.0, {0, 0, 0}, 6.0};
    const std::complex<double> t(std::sqrt(1.0 + 36.0 * 36.0) * 0.6, 36.0 * 0.8);
    LogComplex A = sphere_amplitude(sph, t);
    CHECK(A.logmag == doctest::Approx(44.2155204770904499).epsilon(1e-11));
    CHECK(A.phase == doctest::Approx(1.09681846150796468).epsilon(1e-8));
  }
}

TEST_CASE("low-frequency limit |A| -> R") {
  SphereObstacle sph{1.0, {0, 0, 0}, 0.01};
  LogComplex A = sphere_amplitude(sph, {1.0, 0.0});
  CHECK(A.abs() == doctest::Approx(1.0).epsilon(0.05));

  // boundary-integral route at the same frequency, and u_N stays finite
  RealDirection alpha(0.6, 0.8, 0.0);
  CHECK(std::isfinite(max_normal_derivative(sph, alpha)));
  VarietyDirection beta = make_variety_direction(e1(), e2(), 0.0);
  LogComplex A5 = amplitude_via_surface_integral(sph, alpha, beta);
  CHECK(A5.abs() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("series convergence guard") {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  CHECK_THROWS_AS(sphere_amplitude(sph, {0.0, 1e12}), NoConvergenceError);
}

TEST_CASE("normal derivative on the surface") {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  RealDirection alpha(0.6, 0.8, 0.0);

  SUBCASE("off-surface points are rejected") {
    CHECK_THROWS_AS(sphere_normal_derivative(sph, alpha, Vec3{1.5, 0, 0}), OffSurfaceError);
  }
  SUBCASE("rotational symmetry: u_N depends on alpha.s only") {
    Vec3 s1 = RealDirection::normalized(Vec3{0.8, 0.0, 0.6}).vec();
    const double mu = dot(alpha.vec(), s1);
    Vec3 perp = RealDirection::normalized(cross(alpha.vec(), Vec3{0, 0, 1})).vec();
    Vec3 perp2 = cross(alpha.vec(), perp);
    auto u1 = sphere_normal_derivative(sph, alpha, s1);
    for (double phi : {0.4, 2.0, 5.5}) {
      // another surface point with the same alpha.s
      Vec3 cand = mu * alpha.vec() +
                  std::sqrt(1.0 - mu * mu) * (std::cos(phi) * perp + std::sin(phi) * perp2);
      auto u2 = sphere_normal_derivative(sph, alpha, cand);
      CHECK(std::abs(u1 - u2) < 1e-12 * std::abs(u1));
    }
  }
  SUBCASE("low-frequency magnitude stays finite") {
    SphereObstacle lowf{1.0, {0, 0, 0}, 0.01};
    double m = max_normal_derivative(lowf, alpha);
    CHECK(std::isfinite(m));
    CHECK(m > 0.0);
  }
}

TEST_CASE("reciprocity through the surface integral") {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  std::mt19937 rng(2024);
  for (int i = 0; i < 20; ++i) {
    RealDirection alpha = random_direction(rng);
    RealDirection betad = random_direction(rng);
    auto vfor = [&](const RealDirection& d) {
      Vec3 ref = std::abs(d.x()) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      return RealDirection::normalized(cross(d.vec(), ref));
    };
    LogComplex a1 = amplitude_via_surface_integral(
        sph, alpha, VarietyDirection(betad, vfor(betad), 0.0));
    LogComplex a2 = amplitude_via_surface_integral(
        sph, -betad, VarietyDirection(-alpha, vfor(-alpha), 0.0));
    CHECK(std::abs(a1.to_complex() - a2.to_complex()) < 1e-10 * a1.abs());
  }
}

TEST_CASE("cross-representation: series vs surface integral") {
  RealDirection alpha(0.6, 0.8, 0.0);
  for (double k : {1.0, 3.0, 6.0}) {
    SphereObstacle sph{1.0, {0, 0, 0}, k};
    for (double b : {0.0, 5.0}) {
      VarietyDirection beta = make_variety_direction(e1(), e2(), b);
      LogComplex series = sphere_amplitude(sph, beta.dot_real(alpha));
      LogComplex surf = amplitude_via_surface_integral(sph, alpha, beta);
      const double tol = b == 0.0 ? 1e-10 : 1e-4;
      CHECK(std::abs(series.logmag - surf.logmag) <=
            tol * std::max(1.0, std::abs(series.logmag)));
      if (b == 0.0)
        CHECK(std::abs(LogComplex::wrap_phase(series.phase - surf.phase)) < 1e-9);
    }
  }
  // b = 10 stays within the double-precision cancellation floor for kR <= 3.
  for (double k : {1.0, 3.0}) {
    SphereObstacle sph{1.0, {0, 0, 0}, k};
    VarietyDirection beta = make_variety_direction(e1(), e2(), 10.0);
    LogComplex series = sphere_amplitude(sph, beta.dot_real(alpha));
    LogComplex surf = amplitude_via_surface_integral(sph, alpha, beta);
    CHECK(std::abs(series.logmag - surf.logmag) <=
          1e-4 * std::max(1.0, std::abs(series.logmag)));
  }
}

TEST_CASE("amplitude depends on beta.alpha only (surface-integral route)") {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  // alpha mirrored across the (w, v) plane keeps both w.alpha and v.alpha.
  const double c1 = 0.3, c2 = 0.5;
  const double c3 = std::sqrt(1.0 - c1 * c1 - c2 * c2);
  RealDirection alpha1(c1, c2, c3), alpha2(c1, c2, -c3);
  for (double b : {0.0, 2.0}) {
    VarietyDirection beta = make_variety_direction(e1(), e2(), b);
    LogComplex a1 = amplitude_via_surface_integral(sph, alpha1, beta);
    LogComplex a2 = amplitude_via_surface_integral(sph, alpha2, beta);
    CHECK(std::abs(a1.logmag - a2.logmag) <= 1e-10 * std::max(1.0, std::abs(a1.logmag)));
    CHECK(std::abs(LogComplex::wrap_phase(a1.phase - a2.phase)) < 1e-9);
  }
}

TEST_CASE("off-center translation covariance of the surface integral") {
  const double k = 3.0;
  RealDirection alpha(0.6, 0.8, 0.0);
  SphereObstacle centered{1.0, {0, 0, 0}, k};
  const Vec3 c{0.3, -0.5, 0.2};
  SphereObstacle moved{1.0, c, k};
  for (double b : {0.0, 4.0}) {
    VarietyDirection beta = make_variety_direction(e1(), e2(), b);
    LogComplex a0 = amplitude_via_surface_integral(centered, alpha, beta);
    LogComplex am = amplitude_via_surface_integral(moved, alpha, beta);
    LogComplex predicted = a0 * translation_phase(alpha, beta, c, k);
    CHECK(std::abs(predicted.logmag - am.logmag) <
          1e-8 * std::max(1.0, std::abs(am.logmag)));
    CHECK(std::abs(LogComplex::wrap_phase(predicted.phase - am.phase)) < 1e-7);
  }
}

TEST_CASE("growth envelope of the continued amplitude") {
  const double k = 3.0;
  RealDirection alpha(0.6, 0.8, 0.0);
  for (const Vec3& center : {Vec3{0, 0, 0}, Vec3{0, 0.7, -0.2}}) {
    SphereObstacle sph{1.0, center, k};
    const double env = std::log(max_normal_derivative(sph, alpha) * sph.radius * sph.radius);
    const double hv = dot(e2(), center) + sph.radius;
    SphereObstacle origin_sphere{1.0, {0, 0, 0}, k};
    for (double b : {0.5, 2.0, 5.0, 10.0, 20.0, 30.0}) {
      VarietyDirection beta = make_variety_direction(e1(), e2(), b);
      LogComplex A = sphere_amplitude(origin_sphere, beta.dot_real(alpha)) *
                     translation_phase(alpha, beta, center, k);
      CHECK(A.logmag <= env + k * b * hv + 1e-9);
    }
  }
}

TEST_CASE("scattered field") {
  RealDirection alpha(0.6, 0.8, 0.0);

  SUBCASE("inside points are rejected") {
    SphereObstacle sph{1.0, {0, 0, 0}, 1.0};
    CHECK_THROWS_AS(scattered_field(sph, alpha, Vec3{0.2, 0.1, 0.0}), InsideObstacleError);
  }

  SUBCASE("Dirichlet condition in the exterior limit") {
    SphereObstacle sph{1.0, {0, 0, 0}, 1.0};
    Vec3 sdir = RealDirection::normalized(Vec3{0.3, -0.7, 0.648074069840786}).vec();
    auto u = scattered_field(sph, alpha, (1.0 + 1e-6) * sdir);
    CHECK(std::abs(u) < 1e-3);
  }

  SUBCASE("far-field residual decays like r^-2") {
    SphereObstacle sph{1.0, {0, 0, 0}, 1.0};
    RealDirection betad = RealDirection::normalized(Vec3{0.1, 0.55, 0.82915619758885});
    LogComplex A = sphere_amplitude(sph, dot(betad.vec(), alpha.vec()));
    auto residual = [&](double r) {
      Vec3 x = r * betad.vec();
      auto u = scattered_field(sph, alpha, x);
      auto u0 = std::polar(1.0, sph.k * dot(alpha.vec(), x));
      return std::abs(u - u0 - A.to_complex() * std::polar(1.0, sph.k * r) / r);
    };
    const double ratio = residual(40.0) / residual(20.0);
    CHECK(ratio >= 0.15);
    CHECK(ratio <= 0.6);
  }

  SUBCASE("asymptotic form at 100R on the forward axis") {
    SphereObstacle sph{1.0, {0, 0, 0}, 1.0};
    const double r = 100.0;
    Vec3 x = r * alpha.vec();  // forward axis: u0(x) = e^{ikr}
    auto u = scattered_field(sph, alpha, x);
    auto model = std::polar(1.0, sph.k * r) +
                 sphere_amplitude(sph, 1.0).to_complex() * std::polar(1.0, sph.k * r) / r;
    CHECK(std::abs(u - model) / std::abs(u) < 1e-3);
  }
}

TEST_CASE("forward amplitude via quadrature obeys the optical theorem") {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  RealDirection alpha(0.6, 0.8, 0.0);
  Vec3 vperp = cross(alpha.vec(), Vec3{0, 0, 1});
  VarietyDirection beta(alpha, RealDirection::normalized(vperp), 0.0);
  LogComplex Af = amplitude_via_surface_integral(sph, alpha, beta);
  MieCoefficients mie = mie_coefficients(sph, 80);
  double sum = 0.0;
  for (size_t l = 0; l < mie.T.size(); ++l) sum += (2.0 * l + 1.0) * std::norm(mie.T[l]);
  const double lhs = 4.0 * M_PI / sph.k * im_part(Af);
  const double rhs = 4.0 * M_PI / (sph.k * sph.k) * sum;
  CHECK(std::abs(lhs - rhs) / rhs < 1e-9);
}
