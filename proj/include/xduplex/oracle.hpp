#pragma once

// Reference values from integral representations, evaluated with tanh-sinh
// quadrature. Shares no numerical code with the production kernels; used by
// the test suites and the `selftest` subcommand only.

#include <functional>

namespace xduplex::oracle {

using Integrand = std::function<double(double)>;

/// Tanh-sinh quadrature on [a, b]; level-doubling until successive
/// estimates agree to rel_tol.
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-13);

/// Q(x) from Craig's form (1/pi) int_0^{pi/2} exp(-x^2 / (2 sin^2 t)) dt.
double q_function(double x);

/// K_n(z) = int_0^inf e^{-z cosh t} cosh(n t) dt, n in {0, 1}.
double bessel_k(int order, double z);

/// Gamma(a) = int_0^inf t^{a-1} e^{-t} dt for a > 0.
double gamma_fn(double a);

/// e^x Gamma(a, x) via t = x e^u on the tail integral.
double upper_incomplete_gamma_scaled(double a, double x);

/// e^{z^2/4} D_{-v}(z) straight from its Laplace-type integral.
double parabolic_cylinder_d_scaled(double p, double z);

/// int_0^inf x^{v-1} (e^{-t x} + t^2 x^2 e^{-5 t x / 3} / 2) e^{-beta x^2 - gamma x} dx
double f_helper(double v, double beta, double gamma, double t);

/// Integrates over [a, inf) after truncating where log f drops 41.5 below
/// its peak (1e-18 ratio). `log_f` must return the natural log of f.
double integrate_log_tail(const Integrand& log_f, double a, double scale, double rel_tol = 1e-13);

}  // namespace xduplex::oracle
