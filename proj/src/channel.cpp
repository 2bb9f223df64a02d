#include "xduplex/channel.hpp"

#include <cmath>
#include <string>

namespace xduplex {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw PreconditionError(std::string("SystemParams: ") + name + " must be positive and finite");
  }
}

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

void SystemParams::validate() const {
  require_positive(p_s, "p_s");
  require_positive(p_r, "p_r");
  require_positive(sigma2, "sigma2");
  for (double l : lambda) require_positive(l, "lambda");
  for (double l : lambda_rsi) require_positive(l, "lambda_rsi");
}

SystemParams SystemParams::symmetric(double p_t, double eta) {
  SystemParams p;
  p.p_s = p_t;
  p.p_r = p_t;
  p.lambda_rsi = {eta, eta};
  return p;
}

DerivedConstants derive_constants(const SystemParams& params) {
  params.validate();
  // Means of the noise-normalised gains.
  const auto l = [&](int i) { return params.lambda[i] / params.sigma2; };
  const auto lr = [&](int j) { return params.lambda_rsi[j] / params.sigma2; };
  DerivedConstants c;
  c.eta1 = lr(0) * params.p_r / (l(0) * params.p_s);
  c.eta2 = lr(1) * params.p_r / (l(1) * params.p_s);
  c.c1 = 1.0 / (l(0) * params.p_s) + 1.0 / (l(3) * params.p_r);
  c.c2 = 1.0 / (l(1) * params.p_s) + 1.0 / (l(2) * params.p_r);
  c.c3 = 1.0 / l(0) + 1.0 / l(3);
  return c;
}

void Modulation::validate() const {
  if (!(a1 > 0.0) || !(a2 > 0.0) || !std::isfinite(a1) || !std::isfinite(a2)) {
    throw PreconditionError("Modulation: a1 and a2 must be positive");
  }
}

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, trial_(trial) {}

double TrialStream::uniform() {
  if (available_ == 0) {
    const auto out = Philox4x32::generate(
        {static_cast<std::uint32_t>(trial_), static_cast<std::uint32_t>(trial_ >> 32), block_++, 0u},
        key_);
    buffer_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    buffer_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    available_ = 2;
  }
  const std::uint64_t bits = buffer_[2 - available_--];
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

double TrialStream::exponential(double mean) { return -mean * std::log(uniform()); }

ChannelDraw sample_channels(const SystemParams& params, TrialStream& stream) {
  ChannelDraw d;
  for (int i = 0; i < 4; ++i) d.gamma[i] = stream.exponential(params.lambda[i] / params.sigma2);
  for (int j = 0; j < 2; ++j) d.gamma_si[j] = stream.exponential(params.lambda_rsi[j] / params.sigma2);
  return d;
}

}  // namespace xduplex
