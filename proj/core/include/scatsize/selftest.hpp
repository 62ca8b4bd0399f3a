#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scatsize {

struct SelfTestOptions {
  /// Relative perturbation injected into one Mie coefficient before the
  /// unitarity check; nonzero values are a negative control and must fail.
  double mie_perturbation = 0.0;
};

struct SelfTestResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Embedded invariant suite: Mie unitarity, sphere optical theorem,
/// cross-representation (series vs surface integral), the closed-form
/// surface-growth oracle value, and Born translation covariance.
std::vector<SelfTestResult> run_selftest(const SelfTestOptions& options = {});

/// Prints one PASS/FAIL line per check; returns 0 iff all pass.
int run_selftest_cli(const SelfTestOptions& options, std::ostream& out);

}  // namespace scatsize
