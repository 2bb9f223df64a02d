#include "xduplex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xduplex::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogRatio = 41.5;  // ln(1e18)

// Sum over nodes t = k h for the given level; odd_only skips nodes already
// counted at the coarser level.
double ts_sum(const Integrand& f, double a, double b, double h, bool odd_only) {
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  const int kmax = static_cast<int>(4.0 / h);
  for (int k = odd_only ? 1 : 0; k <= kmax; k += odd_only ? 2 : 1) {
    const double t = k * h;
    const double u = 0.5 * kPi * std::sinh(t);
    const double cu = std::cosh(u);
    const double w = half * 0.5 * kPi * std::cosh(t) / (cu * cu);
    if (w == 0.0) break;
    // Endpoint distances computed without cancellation.
    const double gap = half * std::exp(-u) / cu;
    if (k == 0) {
      sum += w * f(a + half);
    } else {
      sum += w * (f(a + gap) + f(b - gap));
    }
  }
  return sum;
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double h = 0.5;
  double sum = ts_sum(f, a, b, h, false);
  double estimate = sum * h;
  for (int level = 1; level <= 14; ++level) {
    h *= 0.5;
    sum += ts_sum(f, a, b, h, true);
    const double next = sum * h;
    if (level >= 3 && std::abs(next - estimate) <= rel_tol * std::abs(next)) return next;
    if (level >= 3 && next == 0.0 && estimate == 0.0) return 0.0;
    estimate = next;
  }
  return estimate;
}

double integrate_log_tail(const Integrand& log_f, double a, double scale, double rel_tol) {
  double peak = -INFINITY;
  for (int i = 0; i <= 64; ++i) {
    const double v = log_f(a + scale * i / 16.0);
    if (std::isfinite(v)) peak = std::max(peak, v);
  }
  double t = a + scale;
  int below = 0;
  for (int k = 0; k < 400; ++k) {
    const double v = log_f(t);
    peak = std::max(peak, v);
    if (v < peak - kLogRatio) {
      if (++below == 3) break;
    } else {
      below = 0;
    }
    t = a + (t - a) * 1.25;
  }
  const double shift = peak;
  return std::exp(shift) *
         integrate([&](double x) { return std::exp(log_f(x) - shift); }, a, t, rel_tol);
}

double q_function(double x) {
  if (x < 0.0) return 1.0 - q_function(-x);
  if (x == 0.0) return 0.5;
  const double c = 0.5 * x * x;
  return integrate([c](double th) {
           const double s = std::sin(th);
           return std::exp(-c / (s * s));
         },
         0.0, 0.5 * kPi) /
         kPi;
}

double bessel_k(int order, double z) {
  if (z <= 0.0 || (order != 0 && order != 1)) throw std::domain_error("oracle::bessel_k");
  // e^{-z cosh t} cosh(n t) drops below 1e-18 of its t = 0 value by
  // z (cosh T - 1) - n T = 41.5; widen a little for the cosh factor.
  const double upper = std::acosh(1.0 + (kLogRatio + 2.0) / z) + (order == 1 ? 2.0 : 0.0);
  const double shift = z;
  const double inner = integrate(
      [z, order](double t) {
        const double e = std::exp(-z * (std::cosh(t) - 1.0));
        return order == 0 ? e : e * std::cosh(t);
      },
      0.0, upper);
  return inner * std::exp(-shift);
}

double gamma_fn(double a) {
  if (a <= 0.0) throw std::domain_error("oracle::gamma_fn");
  // t = e^u: integrand e^{a u - e^u}, peak at u = ln a.
  const double centre = std::log(a);
  auto log_f = [a](double u) { return a * u - std::exp(u); };
  const double peak = log_f(centre);
  double lo = centre - 1.0;
  while (log_f(lo) > peak - kLogRatio) lo -= 1.0;
  double hi = centre + 1.0;
  while (log_f(hi) > peak - kLogRatio) hi += 0.25;
  const double split = centre;
  auto f = [&](double u) { return std::exp(log_f(u) - peak); };
  return std::exp(peak) * (integrate(f, lo, split) + integrate(f, split, hi));
}

double upper_incomplete_gamma_scaled(double a, double x) {
  if (x <= 0.0) throw std::domain_error("oracle::upper_incomplete_gamma_scaled");
  // t = x e^u, u >= 0: e^x Gamma(a,x) = int_0^inf x^a exp(a u - x (e^u - 1)) du.
  const double log_xa = a * std::log(x);
  auto log_f = [a, x, log_xa](double u) { return log_xa + a * u - x * std::expm1(u); };
  double scale = 1.0 / std::max(x, 1.0);
  if (a > x) scale = std::log(a / x) + 1.0;
  return integrate_log_tail(log_f, 0.0, scale);
}

double parabolic_cylinder_d_scaled(double p, double z) {
  if (p >= 0.0) throw std::domain_error("oracle::parabolic_cylinder_d_scaled");
  const double v = -p;
  auto log_f = [v, z](double t) {
    if (t <= 0.0) return v == 1.0 ? 0.0 : (v > 1.0 ? -INFINITY : INFINITY);
    return (v - 1.0) * std::log(t) - z * t - 0.5 * t * t;
  };
  const double t_peak = 0.5 * (-z + std::sqrt(z * z + 4.0 * v));
  const double scale = std::max(t_peak, 1.0 / (std::abs(z) + 1.0));
  return integrate_log_tail(log_f, 0.0, scale) / gamma_fn(v);
}

double f_helper(double v, double beta, double gamma, double t) {
  auto log_base = [=](double x) { return (v - 1.0) * std::log(x) - beta * x * x - gamma * x; };
  auto first = [=](double x) { return x <= 0.0 ? -INFINITY : log_base(x) - t * x; };
  auto second = [=](double x) {
    return x <= 0.0 ? -INFINITY
                    : log_base(x) + 2.0 * std::log(x) - 5.0 * t * x / 3.0 + std::log(0.5 * t * t);
  };
  const double scale = std::max(v / (gamma + t), 1e-3);
  return integrate_log_tail(first, 0.0, scale) + integrate_log_tail(second, 0.0, scale);
}

}  // namespace xduplex::oracle
