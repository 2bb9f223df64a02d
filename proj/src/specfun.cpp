#include "xduplex/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "xduplex/quadrature.hpp"

namespace xduplex::specfun {

namespace {

constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kTiny = 1e-300;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite argument");
}

bool is_nonpositive_integer(double a) { return a <= 0.0 && a == std::floor(a); }

// Power series about z = 0 (A&S 9.6.13 / 9.6.11), used for 0 < z < 2.
double k0_series(double z) {
  const double y = 0.25 * z * z;
  double term = 1.0;
  double i0 = 1.0;
  double harmonic = 0.0;
  double tail = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= y / (double(k) * k);
    harmonic += 1.0 / k;
    i0 += term;
    tail += harmonic * term;
    if (term * (1.0 + harmonic) < 1e-17 * std::abs(i0)) break;
  }
  return -(std::log(0.5 * z) + kEulerGamma) * i0 + tail;
}

double k1_series(double z) {
  const double y = 0.25 * z * z;
  double term = 1.0;  // y^k / (k! (k+1)!)
  double h_k = 0.0;   // H_k
  double i1_sum = 1.0;
  double psi_sum = (-kEulerGamma) + (1.0 - kEulerGamma);
  for (int k = 1; k < 200; ++k) {
    term *= y / (double(k) * (k + 1));
    h_k += 1.0 / k;
    const double psi = (h_k - kEulerGamma) + (h_k + 1.0 / (k + 1) - kEulerGamma);
    i1_sum += term;
    psi_sum += psi * term;
    if (term * std::abs(psi) < 1e-17 * std::abs(psi_sum)) break;
  }
  const double i1 = 0.5 * z * i1_sum;
  return 1.0 / z + std::log(0.5 * z) * i1 - 0.25 * z * psi_sum;
}

// Steed's continued fraction (Temme's CF2) for K_0 and K_1 at z >= 2.
void k01_continued_fraction(double z, double& k0, double& k1) {
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
  k1 = k0 * (z + 0.5 - h) / z;
}

// x^a * sum_n x^n / (a (a+1) ... (a+n)) = e^x * lower_gamma(a, x), a > 0.
double lower_series_scaled(double a, double x, const Accuracy& acc) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < acc.max_iter * 100; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * acc.rel_tol) return sum * std::pow(x, a);
  }
  throw DomainError("upper_incomplete_gamma: series did not converge");
}

// e^x Gamma(a, x) by modified Lentz on the Legendre continued fraction.
double upper_cf_scaled(double a, double x, const Accuracy& acc) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < acc.max_iter * 100; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < acc.rel_tol) return std::pow(x, a) * h;
  }
  throw DomainError("upper_incomplete_gamma: continued fraction did not converge");
}

// e^x E_1(x).
double e1_scaled(double x, const Accuracy& acc) {
  if (x >= 1.0) return upper_cf_scaled(0.0, x, acc);
  double sum = 0.0;
  double term = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= -x / n;
    sum += term / n;
    if (std::abs(term / n) < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(x) * (-kEulerGamma - std::log(x) - sum);
}

double positive_order_scaled(double a, double x, const Accuracy& acc) {
  if (x < a + 1.0) return std::exp(x) * std::tgamma(a) - lower_series_scaled(a, x, acc);
  return upper_cf_scaled(a, x, acc);
}

}  // namespace

void Accuracy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) throw DomainError("Accuracy: rel_tol must be in (0, 1e-6]");
  if (max_iter < 32) throw DomainError("Accuracy: max_iter must be >= 32");
}

double q_function(double x) {
  require_finite(x, "q_function");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double bessel_k0(double z) {
  require_finite(z, "bessel_k");
  if (z <= 0.0) throw DomainError("bessel_k: z must be positive");
  if (z < 2.0) return k0_series(z);
  double k0, k1;
  k01_continued_fraction(z, k0, k1);
  return k0;
}

double bessel_k1(double z) {
  require_finite(z, "bessel_k");
  if (z <= 0.0) throw DomainError("bessel_k: z must be positive");
  if (z < 2.0) return k1_series(z);
  double k0, k1;
  k01_continued_fraction(z, k0, k1);
  return k1;
}

double bessel_k(int order, double z) {
  switch (order) {
    case 0: return bessel_k0(z);
    case 1: return bessel_k1(z);
    default: throw DomainError("bessel_k: only orders 0 and 1 are supported");
  }
}

double gamma_fn(double a) {
  require_finite(a, "gamma_fn");
  if (is_nonpositive_integer(a)) throw DomainError("gamma_fn: pole at non-positive integer");
  return std::tgamma(a);
}

double upper_incomplete_gamma_scaled(double a, double x, const Accuracy& acc) {
  acc.validate();
  require_finite(a, "upper_incomplete_gamma");
  require_finite(x, "upper_incomplete_gamma");
  if (x < 0.0 || (x == 0.0 && a <= 0.0)) {
    throw DomainError("upper_incomplete_gamma: x must be positive (x = 0 allowed for a > 0)");
  }
  if (x == 0.0) return std::tgamma(a);
  if (a > 0.0) return positive_order_scaled(a, x, acc);

  // Downward recurrence Gamma(b, x) = (Gamma(b+1, x) - x^b e^-x) / b, scaled by e^x.
  double b;
  double value;
  if (is_nonpositive_integer(a)) {
    b = 0.0;
    value = e1_scaled(x, acc);
  } else {
    b = a + std::ceil(-a);
    value = positive_order_scaled(b, x, acc);
  }
  while (b > a + 0.5) {
    b -= 1.0;
    value = (value - std::pow(x, b)) / b;
  }
  return value;
}

double upper_incomplete_gamma(double a, double x, const Accuracy& acc) {
  return upper_incomplete_gamma_scaled(a, x, acc) * std::exp(-x);
}

double parabolic_cylinder_d_scaled(double p, double z, const Accuracy& acc) {
  acc.validate();
  require_finite(p, "parabolic_cylinder_d");
  require_finite(z, "parabolic_cylinder_d");
  if (p >= 0.0) throw DomainError("parabolic_cylinder_d: only negative orders are supported");
  const double v = -p;

  // t = s^2 makes the integrand smooth at the origin for half-integer v.
  auto integrand = [v, z](double s) {
    const double t = s * s;
    if (t == 0.0) return v == 0.5 ? 2.0 : 0.0;
    return 2.0 * std::pow(s, 2.0 * v - 1.0) * std::exp(-z * t - 0.5 * t * t);
  };
  const double t_peak = 0.5 * (-z + std::sqrt(z * z + 4.0 * v));
  const double s_scale = std::max(std::sqrt(t_peak), 1e-3);

  quad::Options opt;
  opt.rel_tol = std::max(acc.rel_tol, 1e-13);
  opt.max_intervals = std::max(acc.max_iter, 32) * 8;
  const auto r = quad::integrate_to_infinity(integrand, 0.0, s_scale, opt);
  if (!r.converged && r.abs_error > 1e-10 * std::abs(r.value)) {
    throw quad::NumericalError("parabolic_cylinder_d: quadrature did not converge");
  }
  return r.value / std::tgamma(v);
}

double parabolic_cylinder_d(double p, double z, const Accuracy& acc) {
  return parabolic_cylinder_d_scaled(p, z, acc) * std::exp(-0.25 * z * z);
}

}  // namespace xduplex::specfun
