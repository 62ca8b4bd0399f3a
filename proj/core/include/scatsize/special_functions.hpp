#pragma once

#include <complex>
#include <vector>

#include "scatsize/log_complex.hpp"

namespace scatsize {

/// Signed magnitude in log form, for real-valued sequences that under/overflow
/// doubles (j_l and y_l at large order).
struct LogReal {
  double logmag = 0.0;
  int sign = 0;  // -1, 0, +1; sign 0 means exact zero

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(logmag); }
};

using ScaledSequence = std::vector<LogComplex>;

/// j_0..j_lmax by downward (Miller) recurrence with normalization.  Values
/// below the double range underflow to 0; no overflow or NaN for any x > 0.
std::vector<double> spherical_bessel_j(int lmax, double x);

/// Same values in log form; exact where plain doubles would underflow.
std::vector<LogReal> spherical_bessel_j_log(int lmax, double x);

/// y_0..y_lmax in log form via stable upward recurrence.
std::vector<LogReal> spherical_bessel_y_log(int lmax, double x);

/// h^(1)_l = j_l + i y_l, l = 0..lmax.
std::vector<std::complex<double>> spherical_hankel1(int lmax, double x);

/// Legendre polynomials P_0..P_lmax at complex z, carried in scaled form so
/// nothing overflows for |z| up to 1e6 and lmax up to 2000.
ScaledSequence legendre_scaled(int lmax, std::complex<double> z);

/// Plain-double P_0..P_lmax for real |mu| <= 1 (|P_l| <= 1 there).
std::vector<double> legendre_real(int lmax, double mu);

}  // namespace scatsize
