#include "xduplex/duplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xduplex {

namespace {

struct Branch {
  double g_in, g_out, g_si;
};

Branch branch_of(Mode m, const ChannelDraw& d) {
  if (m == Mode::fd_a || m == Mode::hd_a) return {d.gamma[0], d.gamma[3], d.gamma_si[0]};
  return {d.gamma[1], d.gamma[2], d.gamma_si[1]};
}

double fd_sinr(const Branch& b, const SystemParams& p, double& x) {
  x = p.p_s * b.g_in / (p.p_r * b.g_si + 1.0);
  const double second = p.p_r * b.g_out;
  return x * second / (x + second + 1.0);
}

double hd_sinr(const Branch& b, const SystemParams& p) {
  const double first = p.p_s * b.g_in;
  const double second = p.p_r * b.g_out;
  return first * second / (first + second + 1.0);
}

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::fd_a: return "fd-a";
    case Mode::fd_b: return "fd-b";
    case Mode::hd_a: return "hd-a";
    case Mode::hd_b: return "hd-b";
  }
  return "?";
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::xd: return "xd";
    case Scheme::fd_a_fixed: return "fd-a";
    case Scheme::fd_b_fixed: return "fd-b";
    case Scheme::hd_a_fixed: return "hd-a";
    case Scheme::hd_b_fixed: return "hd-b";
    case Scheme::hy: return "hy";
    case Scheme::rams: return "rams";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

double sinr_mode(Mode mode, const ChannelDraw& draw, const SystemParams& params) {
  const Branch b = branch_of(mode, draw);
  if (is_full_duplex(mode)) {
    double x;
    return fd_sinr(b, params, x);
  }
  return hd_sinr(b, params);
}

double equivalent_sinr_hd(double raw) {
  if (raw < 0.0 || std::isnan(raw)) throw std::domain_error("equivalent_sinr_hd: negative SINR");
  return std::sqrt(raw + 1.0) - 1.0;
}

ModeDecision select_mode(const ChannelDraw& draw, const SystemParams& params) {
  ModeDecision d;
  const Branch a = branch_of(Mode::fd_a, draw);
  const Branch b = branch_of(Mode::fd_b, draw);
  d.sinr_fd_a = fd_sinr(a, params, d.x1);
  d.sinr_fd_b = fd_sinr(b, params, d.x2);
  d.sinr_hd_a = hd_sinr(a, params);
  d.sinr_hd_b = hd_sinr(b, params);
  d.eq_sinr = {d.sinr_fd_a, d.sinr_fd_b, equivalent_sinr_hd(d.sinr_hd_a), equivalent_sinr_hd(d.sinr_hd_b)};
  // Strict '>' keeps the earlier mode on ties.
  int best = 0;
  for (int m = 1; m < 4; ++m) {
    if (d.eq_sinr[m] > d.eq_sinr[best]) best = m;
  }
  d.chosen = static_cast<Mode>(best);
  d.gamma_max = d.eq_sinr[best];
  return d;
}

double scheme_equivalent_sinr(Scheme scheme, const ModeDecision& d) {
  switch (scheme) {
    case Scheme::xd: return d.gamma_max;
    case Scheme::fd_a_fixed: return d.eq(Mode::fd_a);
    case Scheme::fd_b_fixed: return d.eq(Mode::fd_b);
    case Scheme::hd_a_fixed: return d.eq(Mode::hd_a);
    case Scheme::hd_b_fixed: return d.eq(Mode::hd_b);
    case Scheme::hy: return std::max(d.eq(Mode::fd_a), d.eq(Mode::hd_a));
    case Scheme::rams: return std::max(d.eq(Mode::fd_a), d.eq(Mode::fd_b));
  }
  return 0.0;
}

double scheme_equivalent_sinr(Scheme scheme, const ChannelDraw& draw, const SystemParams& params) {
  return scheme_equivalent_sinr(scheme, select_mode(draw, params));
}

bool scheme_selects_fd(Scheme scheme, const ModeDecision& d) {
  switch (scheme) {
    case Scheme::xd: return is_full_duplex(d.chosen);
    case Scheme::fd_a_fixed:
    case Scheme::fd_b_fixed:
    case Scheme::rams: return true;
    case Scheme::hd_a_fixed:
    case Scheme::hd_b_fixed: return false;
    case Scheme::hy: return d.eq(Mode::fd_a) >= d.eq(Mode::hd_a);
  }
  return false;
}

}  // namespace xduplex
