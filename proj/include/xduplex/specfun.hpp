#pragma once

// Special functions used by the closed-form relay expressions: Gaussian Q,
// modified Bessel K0/K1, Gamma, upper incomplete Gamma (any real order) and
// the parabolic cylinder function for negative orders.
//
// All functions are pure; they throw DomainError on arguments outside their
// supported domain.

#include <stdexcept>

namespace xduplex::specfun {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iteration controls for the series / continued-fraction / quadrature kernels.
struct Accuracy {
  double rel_tol = 1e-15;
  int max_iter = 1000;

  /// Throws DomainError unless rel_tol is in (0, 1e-6] and max_iter >= 32.
  void validate() const;
};

/// Pr(N(0,1) > x).
double q_function(double x);

/// K_order(z) for order 0 or 1, z > 0.
double bessel_k(int order, double z);
double bessel_k0(double z);
double bessel_k1(double z);

/// Euler Gamma. Poles (non-positive integers) throw.
double gamma_fn(double a);

/// Gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt for x > 0 and any real a;
/// x = 0 is accepted for a > 0.
double upper_incomplete_gamma(double a, double x, const Accuracy& acc = {});

/// e^x * Gamma(a, x); finite where the unscaled value under/overflows.
double upper_incomplete_gamma_scaled(double a, double x, const Accuracy& acc = {});

/// D_p(z) for p < 0, from D_{-v}(z) = e^{-z^2/4}/Gamma(v) * int_0^inf t^{v-1} e^{-zt-t^2/2} dt.
double parabolic_cylinder_d(double p, double z, const Accuracy& acc = {});

/// e^{z^2/4} * D_p(z) for p < 0.
double parabolic_cylinder_d_scaled(double p, double z, const Accuracy& acc = {});

}  // namespace xduplex::specfun
