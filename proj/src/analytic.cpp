#include "xduplex/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "xduplex/quadrature.hpp"
#include "xduplex/specfun.hpp"

namespace xduplex::analytic {

namespace {

using specfun::bessel_k0;
using specfun::bessel_k1;

constexpr double kSqrtPi = 1.7724538509055160273;

std::atomic<std::uint64_t> g_clamp_events{0};

double clamp_probability(double p) {
  if (p < 0.0) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  if (p > 1.0) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return 1.0;
  }
  return p;
}

struct BranchModel {
  double l_in, l_out, eta, c, p_s, p_r;
};

BranchModel branch_model(int branch, const DerivedConstants& k, const SystemParams& p) {
  const double s = p.sigma2;
  if (branch == 1) return {p.lambda[0] / s, p.lambda[3] / s, k.eta1, k.c1, p.p_s, p.p_r};
  if (branch == 2) return {p.lambda[1] / s, p.lambda[2] / s, k.eta2, k.c2, p.p_s, p.p_r};
  throw specfun::DomainError("branch must be 1 or 2");
}

void require_positive_threshold(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw specfun::DomainError("threshold x must be positive");
}

void require_identical_rsi(const SystemParams& p) {
  if (p.lambda_rsi[0] != p.lambda_rsi[1]) {
    throw PreconditionError("closed forms assume identical RSI channels (lambda_rsi[0] == lambda_rsi[1])");
  }
}

// Quantities shared by all branch sub-operations at threshold x.
struct BranchEval {
  BranchModel m;
  double y;          // x^2 + 2x, the HD threshold matching FD threshold x
  double beta0, beta1, beta2, beta3, alpha;
  double e_cx;       // e^{-C x}
  double e_cy;       // e^{-C y}
  double e_beta3;    // e^{-beta3}
};

BranchEval evaluate(int branch, double x, const DerivedConstants& k, const SystemParams& p) {
  require_positive_threshold(x);
  BranchEval e;
  e.m = branch_model(branch, k, p);
  const auto& m = e.m;
  const double denom = m.l_in * m.l_out * m.p_s * m.p_r;
  e.y = x * x + 2.0 * x;
  e.beta1 = 2.0 * std::sqrt((x + x * x) / denom);
  e.beta0 = 2.0 * std::sqrt((e.y * e.y + e.y) / denom);
  e.beta2 = 2.0 * std::sqrt((e.y * e.y + e.y + (x + 1.0) * e.y / m.eta) / denom);
  e.beta3 = m.c * e.y + (x + 1.0) / (m.eta * m.l_in * m.p_s);
  const double one_eta = 1.0 + m.eta * x;
  e.alpha = 2.0 * m.eta * (x * x + x) / (m.l_out * m.p_r * one_eta * one_eta);
  e.e_cx = std::exp(-m.c * x);
  e.e_cy = std::exp(-m.c * e.y);
  e.e_beta3 = std::exp(-e.beta3);
  return e;
}

double tail_fd_raw(const BranchEval& e, double x) {
  return e.beta1 * bessel_k1(e.beta1) * e.e_cx / (1.0 + e.m.eta * x) - e.alpha * bessel_k0(e.beta1) * e.e_cx;
}

double tail_hd_raw(const BranchEval& e) { return e.beta0 * bessel_k1(e.beta0) * e.e_cy; }

// sqrt(pi/eta) e^{p/eta} Gamma(1/2, p/eta) = int_0^inf e^{-p x} / (sqrt(x) (1 + eta x)) dx.
double rational_laplace(double p, double eta) {
  return std::sqrt(std::numbers::pi / eta) * specfun::upper_incomplete_gamma_scaled(0.5, p / eta);
}

struct SerInputs {
  double a2, c1, c2, l1ps, l2ps;
};

// Closed form evaluated at distinct eta1 != eta2.
SerTerms ser_terms_distinct(const SerInputs& in, double eta1, double eta2) {
  SerTerms t;
  const double a2 = in.a2, c1 = in.c1, c2 = in.c2;
  const double r1 = 1.0 / (in.l1ps * eta1);
  const double r2 = 1.0 / (in.l2ps * eta2);
  const double e1 = std::exp(-r1);
  const double e2 = std::exp(-r2);
  t.mu1 = 2.0 * c1 + a2 + r1;
  t.mu1_2 = 2.0 * c2 + a2 + r2;
  t.mu2 = t.mu1 + c2;
  t.mu2_2 = t.mu1_2 + c1;
  t.mu3 = 2.0 * c1 + 2.0 * c2 + a2 + r1 + r2;

  auto f2 = [&](double v, double beta, double gamma) {
    return eta1 * f_helper(v, beta, gamma, eta1) - eta2 * f_helper(v, beta, gamma, eta2);
  };
  t.f2_mu2 = f2(1.5, c1, t.mu2);
  t.f2_mu2_2 = f2(1.5, c2, t.mu2_2);
  t.f2_mu3 = f2(2.5, c1 + c2, t.mu3);
  const double p_both = a2 + c1 + c2;
  t.f3 = std::sqrt(eta1) * specfun::upper_incomplete_gamma_scaled(0.5, p_both / eta1) -
         std::sqrt(eta2) * specfun::upper_incomplete_gamma_scaled(0.5, p_both / eta2);

  const double inv_gap = 1.0 / (eta1 - eta2);
  t.s1 = std::sqrt(std::numbers::pi / a2);
  t.s2 = rational_laplace(a2 + c1, eta1);
  t.s3 = eta1 * e1 * f_helper(1.5, c1, t.mu1, eta1);
  t.s4 = rational_laplace(a2 + c2, eta2) + eta2 * e2 * f_helper(1.5, c2, t.mu1_2, eta2);
  t.s5 = kSqrtPi * inv_gap * t.f3 + eta1 * e1 * inv_gap * t.f2_mu2 + eta2 * e2 * inv_gap * t.f2_mu2_2 +
         eta1 * eta2 * e1 * e2 * inv_gap * t.f2_mu3;
  return t;
}

SerTerms average(const SerTerms& a, const SerTerms& b) {
  auto mid = [](double u, double v) { return 0.5 * (u + v); };
  SerTerms t;
  t.mu1 = mid(a.mu1, b.mu1);
  t.mu1_2 = mid(a.mu1_2, b.mu1_2);
  t.mu2 = mid(a.mu2, b.mu2);
  t.mu2_2 = mid(a.mu2_2, b.mu2_2);
  t.mu3 = mid(a.mu3, b.mu3);
  t.f2_mu2 = mid(a.f2_mu2, b.f2_mu2);
  t.f2_mu2_2 = mid(a.f2_mu2_2, b.f2_mu2_2);
  t.f2_mu3 = mid(a.f2_mu3, b.f2_mu3);
  t.f3 = mid(a.f3, b.f3);
  t.s1 = mid(a.s1, b.s1);
  t.s2 = mid(a.s2, b.s2);
  t.s3 = mid(a.s3, b.s3);
  t.s4 = mid(a.s4, b.s4);
  t.s5 = mid(a.s5, b.s5);
  t.perturbed = true;
  return t;
}

struct SymmetricModel {
  double eta, lambda1, c3;
};

SymmetricModel symmetric_model(double p_t, double x, const SystemParams& p) {
  require_positive_threshold(x);
  if (!(p_t > 0.0) || !std::isfinite(p_t)) throw specfun::DomainError("p_t must be positive");
  p.validate();
  if (p.lambda[0] != p.lambda[1] || p.lambda[2] != p.lambda[3] || p.lambda_rsi[0] != p.lambda_rsi[1]) {
    throw PreconditionError("diversity expressions assume symmetric branches and identical RSI");
  }
  const double l1 = p.lambda[0] / p.sigma2;
  const double l4 = p.lambda[3] / p.sigma2;
  const double lr = p.lambda_rsi[0] / p.sigma2;
  return {lr / l1, l1, 1.0 / l1 + 1.0 / l4};
}

}  // namespace

BranchTerms branch_terms(int branch, double x, const DerivedConstants& consts, const SystemParams& params) {
  const BranchEval e = evaluate(branch, x, consts, params);
  const double one_eta = 1.0 + e.m.eta * x;
  BranchTerms t;
  t.beta0 = e.beta0;
  t.beta1 = e.beta1;
  t.beta2 = e.beta2;
  t.beta3 = e.beta3;
  t.alpha = e.alpha;
  t.i1 = (e.beta1 * bessel_k1(e.beta1) * e.e_cx + e.m.eta * x * e.beta2 * bessel_k1(e.beta2) * e.e_beta3) / one_eta;
  t.i2 = e.alpha * (bessel_k0(e.beta1) * e.e_cx - bessel_k0(e.beta2) * e.e_beta3);
  return t;
}

double tail_fd(int branch, double x, const DerivedConstants& consts, const SystemParams& params) {
  return clamp_probability(tail_fd_raw(evaluate(branch, x, consts, params), x));
}

double tail_hd(int branch, double x, const DerivedConstants& consts, const SystemParams& params) {
  return clamp_probability(tail_hd_raw(evaluate(branch, x, consts, params)));
}

JointTail joint_tail_l1_l2(int branch, double x, const DerivedConstants& consts, const SystemParams& params) {
  const BranchEval e = evaluate(branch, x, consts, params);
  const double b2k1 = e.beta2 * bessel_k1(e.beta2) * e.e_beta3;
  JointTail j;
  j.l1 = b2k1 / (1.0 + e.m.eta * x) - e.alpha * bessel_k0(e.beta2) * e.e_beta3;
  j.l2 = tail_hd_raw(e) - b2k1;
  return j;
}

double branch_cdf_factor(int branch, double x, const DerivedConstants& consts, const SystemParams& params) {
  const JointTail j = joint_tail_l1_l2(branch, x, consts, params);
  return 1.0 - tail_fd(branch, x, consts, params) - tail_hd(branch, x, consts, params) + j.l1 + j.l2;
}

double cdf_xd(double x, const DerivedConstants& consts, const SystemParams& params) {
  require_identical_rsi(params);
  return clamp_probability(branch_cdf_factor(1, x, consts, params) * branch_cdf_factor(2, x, consts, params));
}

double outage_xd(double x, const DerivedConstants& consts, const SystemParams& params) {
  require_positive_threshold(x);
  auto factor = [&](int branch) {
    const BranchEval e = evaluate(branch, x, consts, params);
    const double ex = e.m.eta * x;
    // 1 - (e^{-Cx} + eta x e^{-beta3}) / (1 + eta x) without cancellation.
    return (-std::expm1(-e.m.c * x) - ex * std::expm1(-e.beta3)) / (1.0 + ex);
  };
  return clamp_probability(factor(1) * factor(2));
}

double f_helper(double v, double beta, double gamma, double t) {
  if (!(beta > 0.0) || !(t > 0.0)) throw specfun::DomainError("f_helper: beta and t must be positive");
  const double two_beta = 2.0 * beta;
  const double root = std::sqrt(two_beta);
  const double first = std::pow(two_beta, -0.5 * v) * specfun::gamma_fn(v) *
                       specfun::parabolic_cylinder_d_scaled(-v, (gamma + t) / root);
  const double second = 0.5 * t * t * std::pow(two_beta, -0.5 * v - 1.0) * specfun::gamma_fn(v + 2.0) *
                        specfun::parabolic_cylinder_d_scaled(-v - 2.0, (gamma + 5.0 * t / 3.0) / root);
  return first + second;
}

SerTerms ser_terms(const DerivedConstants& consts, const SystemParams& params, const Modulation& mod) {
  params.validate();
  mod.validate();
  require_identical_rsi(params);
  const SerInputs in{mod.a2, consts.c1, consts.c2, params.lambda[0] / params.sigma2 * params.p_s,
                     params.lambda[1] / params.sigma2 * params.p_s};
  const double eta1 = consts.eta1;
  const double eta2 = consts.eta2;
  if (std::abs(eta1 - eta2) > kEtaPerturbation * std::max(eta1, eta2)) return ser_terms_distinct(in, eta1, eta2);
  const double step = kEtaPerturbation * eta1;
  return average(ser_terms_distinct(in, eta1, eta2 + step), ser_terms_distinct(in, eta1, eta2 - step));
}

double ser_xd(const DerivedConstants& consts, const SystemParams& params, const Modulation& mod) {
  const SerTerms t = ser_terms(consts, params, mod);
  const double pre = mod.a1 * std::sqrt(mod.a2) / (2.0 * kSqrtPi);
  return clamp_probability(pre * (t.s1 - t.s2 - t.s3 - t.s4 + t.s5));
}

double ser_fd_floor(double eta, const Modulation& mod) {
  mod.validate();
  if (!(eta > 0.0) || !std::isfinite(eta)) throw specfun::DomainError("ser_fd_floor: eta must be positive");
  const double gamma_3_2 = 0.5 * kSqrtPi;
  const double value = mod.a1 * std::sqrt(mod.a2) / (2.0 * kSqrtPi * std::sqrt(eta)) * gamma_3_2 *
                       specfun::upper_incomplete_gamma_scaled(-0.5, mod.a2 / eta);
  return clamp_probability(value);
}

double ser_quadrature(const std::function<double(double)>& cdf, const Modulation& mod) {
  mod.validate();
  auto integrand = [&](double t) {
    const double x = t * t;
    const double f = x > 0.0 ? cdf(x) : 0.0;
    return 2.0 * std::exp(-mod.a2 * x) * f;
  };
  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-300;
  opt.max_intervals = 2000;
  const double scale = 1.0 / std::sqrt(mod.a2);
  double upper;
  try {
    upper = quad::truncation_point(integrand, 0.0, scale, 1e-16);
  } catch (const quad::NumericalError&) {
    // F == 0 everywhere on the sampled range: the integral is zero.
    return 0.0;
  }
  const auto r = quad::integrate(integrand, 0.0, upper, opt);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "ser_quadrature: no convergence on [0, " << upper << "]: value " << r.value << ", error estimate "
        << r.abs_error << ", " << r.intervals << " intervals";
    throw quad::NumericalError(msg.str());
  }
  return clamp_probability(mod.a1 * std::sqrt(mod.a2) / (2.0 * kSqrtPi) * r.value);
}

double diversity_xd(double p_t, double x, const SystemParams& params) {
  const SymmetricModel s = symmetric_model(p_t, x, params);
  const double rho1 = s.c3 * x;
  const double rho2 = s.c3 * (x * x + 2.0 * x) + (x + 1.0) / (s.eta * s.lambda1);
  const double ex = s.eta * x;
  // M = e^{-rho1/P} + eta x e^{-rho2/P}; P_out = (1 + eta x - M)^2 / (1 + eta x)^2.
  const double gap = -std::expm1(-rho1 / p_t) - ex * std::expm1(-rho2 / p_t);  // 1 + eta x - M
  const double p_dm = rho1 / p_t * std::exp(-rho1 / p_t) + ex * rho2 / p_t * std::exp(-rho2 / p_t);
  // P d[2(1+eta x)M - M^2]/dP over (1 + eta x - M)^2.
  return 2.0 * gap * p_dm / (gap * gap);
}

double diversity_baseline(Baseline scheme, double p_t, double x, const SystemParams& params) {
  const SymmetricModel s = symmetric_model(p_t, x, params);
  const double y = x * x + 2.0 * x;
  switch (scheme) {
    case Baseline::hd_a: return 1.0 - s.c3 * y / p_t;
    case Baseline::fd_a: return (1.0 - x * s.c3 / p_t) / (1.0 + p_t * s.eta / s.c3);
    case Baseline::hy: {
      const double rho1 = s.c3 * x;
      const double rho2 = s.c3 * y + (x + 1.0) / (s.eta * s.lambda1);
      const double ex = s.eta * x;
      return 1.0 - (rho1 * rho1 + ex * rho2 * rho2) / (rho1 + ex * rho2) / p_t;
    }
  }
  return 0.0;
}

bool high_snr_regime(const SystemParams& params) {
  return std::min(params.p_s, params.p_r) / params.sigma2 >= 100.0;
}

std::uint64_t clamp_events() { return g_clamp_events.load(std::memory_order_relaxed); }
void reset_clamp_events() { g_clamp_events.store(0, std::memory_order_relaxed); }

}  // namespace xduplex::analytic
