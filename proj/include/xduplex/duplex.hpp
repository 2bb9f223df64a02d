#pragma once

// Per-realisation SINR of the four relay configurations, the equivalent-SINR
// map that puts half-duplex on the full-duplex scale, and the selection
// rules of every compared scheme.

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "xduplex/channel.hpp"

namespace xduplex {

enum class Mode { fd_a = 0, fd_b = 1, hd_a = 2, hd_b = 3 };

inline constexpr std::array<Mode, 4> kAllModes{Mode::fd_a, Mode::fd_b, Mode::hd_a, Mode::hd_b};

inline constexpr bool is_full_duplex(Mode m) { return m == Mode::fd_a || m == Mode::fd_b; }

std::string_view mode_name(Mode m);

enum class Scheme { xd, fd_a_fixed, fd_b_fixed, hd_a_fixed, hd_b_fixed, hy, rams };

inline constexpr std::array<Scheme, 7> kAllSchemes{Scheme::xd,         Scheme::fd_a_fixed, Scheme::fd_b_fixed,
                                                   Scheme::hd_a_fixed, Scheme::hd_b_fixed, Scheme::hy,
                                                   Scheme::rams};

/// CLI vocabulary: xd, fd-a, fd-b, hd-a, hd-b, hy, rams.
std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

struct ModeDecision {
  Mode chosen = Mode::fd_a;
  double sinr_fd_a = 0.0;
  double sinr_fd_b = 0.0;
  double sinr_hd_a = 0.0;
  double sinr_hd_b = 0.0;
  /// Indexed by Mode: raw SINR for FD modes, sqrt(raw + 1) - 1 for HD modes.
  std::array<double, 4> eq_sinr{};
  double gamma_max = 0.0;
  /// First-hop SNRs scaled by the self-interference, P_S g_k / (P_R g_si_k + 1).
  double x1 = 0.0;
  double x2 = 0.0;

  double eq(Mode m) const { return eq_sinr[static_cast<int>(m)]; }
};

double sinr_mode(Mode mode, const ChannelDraw& draw, const SystemParams& params);

/// sqrt(raw + 1) - 1, the SINR that gives FD the same rate as HD at `raw`.
double equivalent_sinr_hd(double raw);

/// Arg-max over the four equivalent SINRs; ties resolve FD_A > FD_B > HD_A > HD_B.
ModeDecision select_mode(const ChannelDraw& draw, const SystemParams& params);

/// Equivalent SINR a scheme obtains from an already evaluated decision.
double scheme_equivalent_sinr(Scheme scheme, const ModeDecision& decision);
double scheme_equivalent_sinr(Scheme scheme, const ChannelDraw& draw, const SystemParams& params);

/// Whether the configuration the scheme ends up using is full duplex.
bool scheme_selects_fd(Scheme scheme, const ModeDecision& decision);

}  // namespace xduplex
