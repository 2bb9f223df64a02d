#pragma once

// Self-test suite behind `xduplex selftest`: special functions against their
// integral-representation oracles, recurrence invariants, closed forms
// against quadrature, and a reduced Monte Carlo cross-check.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace xduplex::selftest {

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;

  bool passed() const;
  std::size_t failures() const;
  /// One line per check, failures include measured vs expected.
  void print(std::ostream& out) const;
};

/// Special-function implementations under test. Defaults are the production
/// kernels; tests swap one out to inject a fault.
struct Kernels {
  std::function<double(double)> q_function;
  std::function<double(double)> bessel_k0;
  std::function<double(double)> bessel_k1;
  std::function<double(double)> gamma_fn;
  std::function<double(double, double)> upper_incomplete_gamma_scaled;
  std::function<double(double, double)> parabolic_cylinder_d_scaled;

  static Kernels production();
};

struct Options {
  Kernels kernels = Kernels::production();
  std::uint64_t mc_trials = 100'000;
  std::uint64_t seed = 1;
  bool run_specfun = true;
  bool run_analytic = true;
  bool run_mc = true;
};

Report run(const Options& options = {});

}  // namespace xduplex::selftest
