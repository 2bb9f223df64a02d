#pragma once

// System parameters, derived constants and the block-fading channel
// generator for the two-antenna relay.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace xduplex {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Powers are linear and normalised to the noise variance.
struct SystemParams {
  double p_s = 1.0;
  double p_r = 1.0;
  double sigma2 = 1.0;
  /// Means of gamma_1..gamma_4 (S->R via A, S->R via B, R->D via B, R->D via A).
  std::array<double, 4> lambda{1.0, 1.0, 1.0, 1.0};
  /// Means of the residual self-interference gains (B->A, A->B).
  std::array<double, 2> lambda_rsi{0.01, 0.01};

  /// Throws PreconditionError unless every field is strictly positive and finite.
  void validate() const;

  /// P_S = P_R = p_t, all link means 1, both RSI means eta.
  static SystemParams symmetric(double p_t, double eta);
};

struct DerivedConstants {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  /// 1/lambda_1 + 1/lambda_4, the power-free part of c1 under P_S = P_R.
  double c3 = 0.0;
};

DerivedConstants derive_constants(const SystemParams& params);

/// One block-fading realisation; values are per-unit-power SNRs.
struct ChannelDraw {
  std::array<double, 4> gamma{};
  std::array<double, 2> gamma_si{};
};

/// Modulation constants for SER = a1 * E[Q(sqrt(2 a2 gamma))].
struct Modulation {
  double a1 = 1.0;
  double a2 = 1.0;

  void validate() const;
  static constexpr Modulation bpsk() { return {1.0, 1.0}; }
};

/// Philox4x32-10 counter-based generator.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter ctr, Key key);
};

/// Random stream for one trial: keyed by the master seed, counter = (trial, block).
/// Two streams with the same (seed, trial) produce identical sequences no
/// matter which worker owns them.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial);

  /// Uniform on (0, 1].
  double uniform();
  /// Exponential with the given mean.
  double exponential(double mean);

 private:
  Philox4x32::Key key_;
  std::uint64_t trial_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

/// Six independent exponential draws with means lambda_i / sigma2 and
/// lambda_rsi_j / sigma2.
ChannelDraw sample_channels(const SystemParams& params, TrialStream& stream);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace xduplex
