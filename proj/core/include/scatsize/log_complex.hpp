#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace scatsize {

/// A complex value stored as (ln|z|, arg z).  This is the only representation
/// scattering amplitudes travel in: |A(beta(b), alpha)| reaches e^{k b d} and
/// would overflow doubles long before the b-grids of interest end.
///
/// Arithmetic contract:
///   * multiplication adds logmags and phases (phase re-wrapped to (-pi, pi]),
///   * addition factors out the larger logmag before mixing,
///   * chains of additions go through LogAccumulator, which renormalizes its
///     scaled partial sum whenever the scaled magnitude exceeds 1e100.
/// Exact zero is a separate flag; logmag/phase of a zero are meaningless.
struct LogComplex {
  double logmag = 0.0;
  double phase = 0.0;  // principal value in (-pi, pi]
  bool zero = false;

  static LogComplex zero_value() { return LogComplex{0.0, 0.0, true}; }

  static LogComplex from_polar_log(double logmag, double phase) {
    return LogComplex{logmag, wrap_phase(phase), false};
  }

  static LogComplex from_complex(std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0)) return zero_value();
    return from_polar_log(std::log(std::abs(z)), std::arg(z));
  }

  static LogComplex from_real(double x) {
    if (x == 0.0) return zero_value();
    return LogComplex{std::log(std::abs(x)), x > 0.0 ? 0.0 : M_PI, false};
  }

  /// e^{i t}; unit modulus.
  static LogComplex unit_phase(double t) { return from_polar_log(0.0, t); }

  static double wrap_phase(double t) {
    double r = std::remainder(t, 2.0 * M_PI);
    if (r <= -M_PI) r += 2.0 * M_PI;
    return r;
  }

  /// May over/underflow for |logmag| beyond ~709; callers that hold
  /// exponentially large values must stay in log form.
  std::complex<double> to_complex() const {
    if (zero) return {0.0, 0.0};
    return std::polar(std::exp(logmag), phase);
  }

  double abs() const { return zero ? 0.0 : std::exp(logmag); }

  friend LogComplex operator*(const LogComplex& a, const LogComplex& b) {
    if (a.zero || b.zero) return zero_value();
    return from_polar_log(a.logmag + b.logmag, a.phase + b.phase);
  }

  friend LogComplex operator/(const LogComplex& a, const LogComplex& b) {
    if (a.zero) return zero_value();
    return from_polar_log(a.logmag - b.logmag, a.phase - b.phase);
  }

  friend LogComplex operator*(const LogComplex& a, std::complex<double> c) {
    return a * from_complex(c);
  }

  friend LogComplex operator/(const LogComplex& a, std::complex<double> c) {
    return a / from_complex(c);
  }

  friend LogComplex operator-(const LogComplex& a) {
    if (a.zero) return a;
    return from_polar_log(a.logmag, a.phase + M_PI);
  }

  friend LogComplex operator+(const LogComplex& a, const LogComplex& b) {
    if (a.zero) return b;
    if (b.zero) return a;
    const LogComplex& big = a.logmag >= b.logmag ? a : b;
    const LogComplex& small = a.logmag >= b.logmag ? b : a;
    std::complex<double> s = std::polar(1.0, big.phase) +
                             std::polar(std::exp(small.logmag - big.logmag), small.phase);
    if (s == std::complex<double>(0.0, 0.0)) return zero_value();
    return from_polar_log(big.logmag + std::log(std::abs(s)), std::arg(s));
  }

  friend LogComplex operator-(const LogComplex& a, const LogComplex& b) { return a + (-b); }
};

/// Running sum of LogComplex terms held as (scaled complex, log offset).
class LogAccumulator {
 public:
  void add(const LogComplex& t) {
    if (t.zero) return;
    if (!any_) {
      offset_ = t.logmag;
      acc_ = std::polar(1.0, t.phase);
      any_ = true;
      return;
    }
    double rel = t.logmag - offset_;
    if (rel > 700.0) {
      // Incoming term dwarfs the current scale; move the offset first.
      acc_ *= std::exp(-rel);
      offset_ = t.logmag;
      rel = 0.0;
    }
    acc_ += std::polar(std::exp(rel), t.phase);
    double m = std::abs(acc_);
    if (m > 1e100) {
      acc_ /= m;
      offset_ += std::log(m);
    }
  }

  LogComplex value() const {
    if (!any_ || acc_ == std::complex<double>(0.0, 0.0)) return LogComplex::zero_value();
    return LogComplex::from_polar_log(offset_ + std::log(std::abs(acc_)), std::arg(acc_));
  }

  /// ln of the current |sum|; -inf while empty/zero.  Drives series
  /// truncation tests without materializing the value.
  double current_logmag() const {
    if (!any_) return -std::numeric_limits<double>::infinity();
    double m = std::abs(acc_);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return offset_ + std::log(m);
  }

 private:
  std::complex<double> acc_{0.0, 0.0};
  double offset_ = 0.0;
  bool any_ = false;
};

/// ln|sin z| etc. need e^{iz} with complex z in log form: |e^{iz}| = e^{-Im z}.
inline LogComplex log_exp_i(std::complex<double> z) {
  return LogComplex::from_polar_log(-z.imag(), z.real());
}

inline LogComplex log_sin(std::complex<double> z) {
  // (e^{iz} - e^{-iz}) / 2i
  LogComplex s = log_exp_i(z) - log_exp_i(-z);
  return s / std::complex<double>(0.0, 2.0);
}

inline LogComplex log_cos(std::complex<double> z) {
  LogComplex s = log_exp_i(z) + log_exp_i(-z);
  return s / std::complex<double>(2.0, 0.0);
}

}  // namespace scatsize
