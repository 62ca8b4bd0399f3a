#include "scatsize/special_functions.hpp"

#include <algorithm>
#include <cmath>

#include "scatsize/errors.hpp"

namespace scatsize {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// j_0 and j_1 from closed forms, series-guarded near 0.
double j0_exact(double x) {
  if (x < 1e-4) return 1.0 - x * x / 6.0 * (1.0 - x * x / 20.0);
  return std::sin(x) / x;
}

double j1_exact(double x) {
  if (x < 1e-4) return x / 3.0 * (1.0 - x * x / 10.0);
  return std::sin(x) / (x * x) - std::cos(x) / x;
}

}  // namespace

std::vector<LogReal> spherical_bessel_j_log(int lmax, double x) {
  if (!(x > 0.0)) throw DomainError("spherical_bessel_j: x must be > 0");
  if (lmax < 0) throw DomainError("spherical_bessel_j: lmax must be >= 0");

  const double j0t = j0_exact(x);
  const double j1t = j1_exact(x);

  std::vector<LogReal> out(lmax + 1);
  if (lmax == 0) {
    out[0] = LogReal{j0t == 0.0 ? 0.0 : std::log(std::abs(j0t)), sign_of(j0t)};
    return out;
  }

  // Downward recurrence from a start order with the standard stability margin,
  // carried with a running log offset so no intermediate overflows.
  const int start = lmax + std::max(20, (int)std::ceil(std::sqrt(40.0 * lmax)));
  std::vector<double> raw(lmax + 1, 0.0);
  std::vector<double> off(lmax + 1, 0.0);

  double fnext = 0.0;   // f_{l+1}
  double fcurr = 1e-30; // f_l seed
  double offset = 0.0;
  for (int l = start; l >= 0; --l) {
    if (l <= lmax) {
      raw[l] = fcurr;
      off[l] = offset;
    }
    if (l == 0) break;
    double fprev = (2.0 * l + 1.0) / x * fcurr - fnext;
    fnext = fcurr;
    fcurr = fprev;
    double m = std::max(std::abs(fcurr), std::abs(fnext));
    if (m > 1e250) {
      // Stored entries keep the offset they were emitted with.
      fcurr /= m;
      fnext /= m;
      offset += std::log(m);
    }
  }

  // Anchor against whichever of j_0/j_1 is better conditioned.
  int anchor = std::abs(j0t) >= std::abs(j1t) ? 0 : 1;
  double anchor_true = anchor == 0 ? j0t : j1t;
  double fa = raw[anchor];
  double oa = off[anchor];
  if (fa == 0.0) {  // pathological; fall back to the other anchor
    anchor = 1 - anchor;
    anchor_true = anchor == 0 ? j0t : j1t;
    fa = raw[anchor];
    oa = off[anchor];
  }
  const double logscale = std::log(std::abs(anchor_true)) - (std::log(std::abs(fa)) + oa);
  const int sscale = sign_of(anchor_true) * sign_of(fa);

  for (int l = 0; l <= lmax; ++l) {
    if (raw[l] == 0.0) {
      out[l] = LogReal{0.0, 0};
    } else {
      out[l] = LogReal{std::log(std::abs(raw[l])) + off[l] + logscale, sign_of(raw[l]) * sscale};
    }
  }
  // Exact closed forms for the first two orders (the recurrence reproduces
  // them to roundoff; the closed forms also capture exact zeros like j0(pi)).
  out[0] = LogReal{j0t == 0.0 ? 0.0 : std::log(std::abs(j0t)), sign_of(j0t)};
  if (lmax >= 1) out[1] = LogReal{j1t == 0.0 ? 0.0 : std::log(std::abs(j1t)), sign_of(j1t)};
  return out;
}

std::vector<double> spherical_bessel_j(int lmax, double x) {
  auto logs = spherical_bessel_j_log(lmax, x);
  std::vector<double> out(logs.size());
  for (size_t i = 0; i < logs.size(); ++i) out[i] = logs[i].value();
  return out;
}

std::vector<LogReal> spherical_bessel_y_log(int lmax, double x) {
  if (!(x > 0.0)) throw DomainError("spherical_bessel_y: x must be > 0");
  if (lmax < 0) throw DomainError("spherical_bessel_y: lmax must be >= 0");

  std::vector<LogReal> out(lmax + 1);
  double y0 = -std::cos(x) / x;
  double y1 = -std::cos(x) / (x * x) - std::sin(x) / x;
  out[0] = LogReal{y0 == 0.0 ? 0.0 : std::log(std::abs(y0)), sign_of(y0)};
  if (lmax == 0) return out;
  out[1] = LogReal{y1 == 0.0 ? 0.0 : std::log(std::abs(y1)), sign_of(y1)};

  // Upward recurrence is the stable direction for y_l; renormalize the pair
  // whenever it threatens the double range.
  double offset = 0.0;
  double prev = y0, curr = y1;
  for (int l = 1; l < lmax; ++l) {
    double next = (2.0 * l + 1.0) / x * curr - prev;
    prev = curr;
    curr = next;
    double m = std::max(std::abs(prev), std::abs(curr));
    if (m > 1e250) {
      prev /= m;
      curr /= m;
      offset += std::log(m);
    }
    out[l + 1] =
        curr == 0.0 ? LogReal{0.0, 0} : LogReal{std::log(std::abs(curr)) + offset, sign_of(curr)};
  }
  return out;
}

std::vector<std::complex<double>> spherical_hankel1(int lmax, double x) {
  auto jl = spherical_bessel_j(lmax, x);
  auto yl = spherical_bessel_y_log(lmax, x);
  std::vector<std::complex<double>> out(lmax + 1);
  for (int l = 0; l <= lmax; ++l) out[l] = {jl[l], yl[l].value()};
  return out;
}

ScaledSequence legendre_scaled(int lmax, std::complex<double> z) {
  if (lmax < 0) throw DomainError("legendre_scaled: lmax must be >= 0");
  ScaledSequence out;
  out.reserve(lmax + 1);

  std::complex<double> prev(1.0, 0.0);  // P_0
  std::complex<double> curr = z;        // P_1
  double offset = 0.0;

  auto emit = [&](std::complex<double> p) {
    if (p == std::complex<double>(0.0, 0.0)) {
      out.push_back(LogComplex::zero_value());
    } else {
      out.push_back(LogComplex::from_polar_log(std::log(std::abs(p)) + offset, std::arg(p)));
    }
  };

  emit(prev);
  if (lmax == 0) return out;
  emit(curr);
  for (int l = 1; l < lmax; ++l) {
    std::complex<double> next =
        ((2.0 * l + 1.0) * z * curr - (double)l * prev) / (double)(l + 1);
    prev = curr;
    curr = next;
    double m = std::max(std::abs(prev), std::abs(curr));
    if (m > 1e100) {
      prev /= m;
      curr /= m;
      offset += std::log(m);
    }
    emit(curr);
  }
  return out;
}

std::vector<double> legendre_real(int lmax, double mu) {
  std::vector<double> out(lmax + 1);
  out[0] = 1.0;
  if (lmax == 0) return out;
  out[1] = mu;
  for (int l = 1; l < lmax; ++l)
    out[l + 1] = ((2.0 * l + 1.0) * mu * out[l] - l * out[l - 1]) / (l + 1);
  return out;
}

}  // namespace scatsize
