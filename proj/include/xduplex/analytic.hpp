#pragma once

// Closed-form (high-SNR asymptotic) performance of the adaptive relay:
// branch tail probabilities, the end-to-end SINR CDF, the outage
// approximation, the average-SER closed form and its quadrature check, the
// full-duplex error floor, and finite-SNR diversity orders.
//
// Every probability is clamped to [0, 1]; clamp events are counted
// process-wide (see clamp_events()). The asymptotic forms are only claimed to
// hold at high SNR, see high_snr_regime().

#include <cstdint>
#include <functional>

#include "xduplex/channel.hpp"

namespace xduplex::analytic {

/// Argument terms of one relay branch (1: antennas A/B as in mode A, 2: mode B).
struct BranchTerms {
  double beta0 = 0.0;  // exact half-duplex tail argument
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;  // exponent, not a Bessel argument
  double alpha = 0.0;  // K0 coefficient from the first-order RSI expansion
  double i1 = 0.0;
  double i2 = 0.0;
};

BranchTerms branch_terms(int branch, double x, const DerivedConstants& consts, const SystemParams& params);

/// Pr(gamma_fd > x) on the branch, first order in the RSI expansion.
double tail_fd(int branch, double x, const DerivedConstants& consts, const SystemParams& params);

/// Pr(gamma_hd > x^2 + 2x) on the branch (exact two-hop AF tail).
double tail_hd(int branch, double x, const DerivedConstants& consts, const SystemParams& params);

struct JointTail {
  double l1 = 0.0;  // RSI above the crossover: FD constraint is binding
  double l2 = 0.0;  // RSI below the crossover: HD constraint is binding
};

/// Split of Pr(gamma_fd > x, gamma_hd > x^2 + 2x).
JointTail joint_tail_l1_l2(int branch, double x, const DerivedConstants& consts, const SystemParams& params);

/// Pr(gamma_fd < x, gamma_hd < x^2 + 2x) = 1 - tail_fd - tail_hd + L1 + L2 (not clamped).
double branch_cdf_factor(int branch, double x, const DerivedConstants& consts, const SystemParams& params);

/// Pr(gamma_max < x). Requires lambda_rsi[0] == lambda_rsi[1].
double cdf_xd(double x, const DerivedConstants& consts, const SystemParams& params);

/// Outage approximation with K1(z) ~ 1/z and K0 dropped.
double outage_xd(double x, const DerivedConstants& consts, const SystemParams& params);

/// int_0^inf x^{v-1} (e^{-t x} + t^2 x^2 e^{-5 t x/3} / 2) e^{-beta x^2 - gamma x} dx
/// in parabolic-cylinder closed form.
double f_helper(double v, double beta, double gamma, double t);

struct SerTerms {
  double mu1 = 0.0, mu1_2 = 0.0, mu2 = 0.0, mu2_2 = 0.0, mu3 = 0.0;
  /// eta1 F(v,beta,gamma,eta1) - eta2 F(v,beta,gamma,eta2) for the three product terms.
  double f2_mu2 = 0.0, f2_mu2_2 = 0.0, f2_mu3 = 0.0;
  double f3 = 0.0;
  /// Integral pieces; SER = a1 sqrt(a2) / (2 sqrt(pi)) * (s1 - s2 - s3 - s4 + s5).
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0, s5 = 0.0;
  /// True when eta1 ~ eta2 and the terms are a two-sided perturbation average.
  bool perturbed = false;
};

/// Relative offset applied to eta2 when eta1 == eta2 makes 1/(eta1 - eta2) singular.
inline constexpr double kEtaPerturbation = 1e-5;

SerTerms ser_terms(const DerivedConstants& consts, const SystemParams& params, const Modulation& mod);

/// Asymptotic average SER of the adaptive scheme. Requires lambda_rsi[0] == lambda_rsi[1].
double ser_xd(const DerivedConstants& consts, const SystemParams& params, const Modulation& mod);

/// SER of a full-duplex branch as SNR -> inf, where Pr(gamma_fd < x) -> eta x / (1 + eta x).
double ser_fd_floor(double eta, const Modulation& mod);

/// a1 sqrt(a2) / (2 sqrt(pi)) int_0^inf e^{-a2 x} x^{-1/2} F(x) dx, with x = t^2.
/// Throws quad::NumericalError when the adaptive rule does not converge.
double ser_quadrature(const std::function<double(double)>& cdf, const Modulation& mod);

/// Finite-SNR diversity order -dln P_out / dln P_t of outage_xd at P_S = P_R = p_t.
/// Requires lambda_1 = lambda_2, lambda_3 = lambda_4, lambda_rsi equal; the
/// powers inside `params` are ignored.
double diversity_xd(double p_t, double x, const SystemParams& params);

enum class Baseline { hd_a, fd_a, hy };

/// Approximate finite-SNR diversity of the fixed-antenna baselines (same preconditions).
double diversity_baseline(Baseline scheme, double p_t, double x, const SystemParams& params);

/// Outage threshold on the equivalent SINR for a target rate r0 (bit/s/Hz).
inline double outage_threshold(double r0) { return std::exp2(r0) - 1.0; }

/// The asymptotic expressions are flagged valid for min(P_S, P_R)/sigma2 >= 20 dB.
bool high_snr_regime(const SystemParams& params);

std::uint64_t clamp_events();
void reset_clamp_events();

}  // namespace xduplex::analytic
