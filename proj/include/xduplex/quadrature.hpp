#pragma once

// Adaptive Gauss-Kronrod (G7/K15) integration with global error-driven
// bisection, plus a truncation helper for [a, inf) integrands that decay.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace xduplex::quad {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over the finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  r.evaluations = 15;
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (error <= target) {
      r.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval no longer splittable in double precision.
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    r.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the segments to shed the drift of the running totals.
  double sum = 0.0, err = 0.0;
  r.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  r.value = sum;
  r.abs_error = err;
  return r;
}

/// Finds T > a such that |f| stays below `ratio` of its sampled peak beyond T.
/// `scale` is a rough width of the integrand's bulk.
template <class F>
double truncation_point(F&& f, double a, double scale, double ratio = 1e-18) {
  double peak = 0.0;
  // Fine sampling of the bulk catches an interior maximum.
  for (int i = 0; i <= 64; ++i) {
    peak = std::max(peak, std::abs(f(a + scale * i / 16.0)));
  }
  double t = a + scale;
  int below = 0;
  for (int k = 0; k < 200; ++k) {
    const double v = std::abs(f(t));
    peak = std::max(peak, v);
    if (v <= ratio * peak) {
      if (++below == 3) return t;
    } else {
      below = 0;
    }
    t = a + (t - a) * 1.5;
  }
  throw NumericalError("truncation_point: integrand does not decay");
}

/// Integrates f over [a, inf) by truncating where f falls below ratio*peak.
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {},
                             double ratio = 1e-18) {
  const double upper = truncation_point(f, a, scale, ratio);
  return integrate(f, a, upper, opt);
}

}  // namespace xduplex::quad
