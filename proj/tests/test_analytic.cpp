#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "xduplex/analytic.hpp"
#include "xduplex/duplex.hpp"
#include "xduplex/mc.hpp"
#include "xduplex/oracle.hpp"
#include "xduplex/quadrature.hpp"
#include "xduplex/specfun.hpp"

using namespace xduplex;
using doctest::Approx;

namespace {

SystemParams at_db(double db, double eta = 0.01) { return SystemParams::symmetric(db_to_linear(db), eta); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Frequencies {
  double fd = 0.0, hd = 0.0, joint = 0.0;
  double n = 0.0;
  double se(double p) const { return std::sqrt(p * (1.0 - p) / n); }
};

// Branch-1 tail frequencies Pr(fd > x), Pr(hd > x^2 + 2x) and their joint.
Frequencies branch_tails(const SystemParams& p, double x, std::uint64_t trials) {
  const double y = x * x + 2.0 * x;
  std::uint64_t fd = 0, hd = 0, joint = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    TrialStream s(99, i);
    const auto d = sample_channels(p, s);
    const bool f = sinr_mode(Mode::fd_a, d, p) > x;
    const bool h = sinr_mode(Mode::hd_a, d, p) > y;
    fd += f;
    hd += h;
    joint += f && h;
  }
  const double n = static_cast<double>(trials);
  return {fd / n, hd / n, joint / n, n};
}

}  // namespace

TEST_SUITE("analytic") {
  TEST_CASE("branch terms") {
    const auto p = at_db(30.0);
    const auto k = derive_constants(p);
    for (double x : {0.1, 1.0, 3.0, 10.0}) {
      const auto t = analytic::branch_terms(1, x, k, p);
      CHECK(t.beta0 > 0.0);
      CHECK(t.beta1 > 0.0);
      CHECK(t.beta2 > 0.0);
      CHECK(t.beta2 >= t.beta0);
    }
    CHECK_THROWS_AS(analytic::branch_terms(3, 1.0, k, p), specfun::DomainError);
    CHECK_THROWS_AS(analytic::tail_fd(1, 0.0, k, p), specfun::DomainError);
    CHECK_THROWS_AS(analytic::cdf_xd(-1.0, k, p), specfun::DomainError);
  }

  TEST_CASE("tails at the origin and far out") {
    const auto p = at_db(20.0);
    const auto k = derive_constants(p);
    CHECK(analytic::tail_fd(1, 1e-9, k, p) == Approx(1.0).epsilon(1e-6));
    CHECK(analytic::tail_hd(1, 1e-9, k, p) == Approx(1.0).epsilon(1e-6));
    CHECK(analytic::tail_fd(1, 1e4, k, p) < 1e-12);
    CHECK(analytic::tail_hd(2, 1e4, k, p) < 1e-12);
    const auto j0 = analytic::joint_tail_l1_l2(1, 1e-9, k, p);
    CHECK(j0.l1 + j0.l2 == Approx(1.0).epsilon(1e-6));
    CHECK(analytic::cdf_xd(1e-9, k, p) < 1e-6);
    CHECK(analytic::outage_xd(1e-9, k, p) < 1e-6);

    auto heavy = p;
    heavy.lambda_rsi = {1e6, 1e6};
    const auto kh = derive_constants(heavy);
    CHECK(analytic::joint_tail_l1_l2(1, 3.0, kh, heavy).l1 < 1e-5);
    CHECK(analytic::joint_tail_l1_l2(1, 3.0, kh, heavy).l1 < 1e-3 * analytic::joint_tail_l1_l2(1, 3.0, k, p).l1);
  }

  TEST_CASE("tails against Monte Carlo at 20 dB") {
    const auto p = at_db(20.0);
    const auto k = derive_constants(p);
    const auto f = branch_tails(p, 3.0, 10'000'000);
    // The FD tail is first order in the RSI expansion: allow 1% of the
    // complementary probability on top of the sampling error.
    CHECK(std::abs(analytic::tail_fd(1, 3.0, k, p) - f.fd) < 0.01 * (1.0 - f.fd) + 4.0 * f.se(f.fd));
    const auto g = branch_tails(p, 1.0, 10'000'000);
    // The HD tail is exact.
    CHECK(std::abs(analytic::tail_hd(1, 1.0, k, p) - g.hd) < 4.0 * g.se(g.hd));
  }

  TEST_CASE("L1 + L2 matches the joint tail at 30 dB") {
    const auto p = at_db(30.0);
    const auto k = derive_constants(p);
    const auto f = branch_tails(p, 3.0, 10'000'000);
    const auto j = analytic::joint_tail_l1_l2(1, 3.0, k, p);
    CHECK(std::abs(j.l1 + j.l2 - f.joint) < 0.01 * (1.0 - f.joint) + 4.0 * f.se(f.joint));
  }

  TEST_CASE("branch symmetry and assembly identity") {
    for (double db : {5.0, 20.0, 35.0, 50.0}) {
      const auto p = at_db(db);
      const auto k = derive_constants(p);
      for (double x : {0.2, 1.0, 3.0, 8.0}) {
        const double f1 = analytic::branch_cdf_factor(1, x, k, p);
        const double f2 = analytic::branch_cdf_factor(2, x, k, p);
        CHECK(f1 == f2);
        const auto j = analytic::joint_tail_l1_l2(1, x, k, p);
        CHECK(f1 == 1.0 - analytic::tail_fd(1, x, k, p) - analytic::tail_hd(1, x, k, p) + j.l1 + j.l2);
        CHECK(analytic::cdf_xd(x, k, p) == std::clamp(f1 * f2, 0.0, 1.0));
      }
    }
    auto asym = at_db(30.0);
    asym.lambda_rsi = {0.01, 0.02};
    CHECK_THROWS_AS(analytic::cdf_xd(3.0, derive_constants(asym), asym), PreconditionError);
  }

  TEST_CASE("cdf_xd against the empirical CDF at 30 dB") {
    const auto p = at_db(30.0);
    const auto k = derive_constants(p);
    const std::vector<double> xs{3.0};
    const auto emp = mc::empirical_cdf(Scheme::xd, p, xs, 10'000'000, 5);
    CHECK(rel(analytic::cdf_xd(3.0, k, p), emp[0]) < 0.10);
  }

  TEST_CASE("cdf_xd nondecreasing in the high-SNR region") {
    for (double db : {30.0, 40.0, 50.0}) {
      const auto p = at_db(db);
      const auto k = derive_constants(p);
      double prev = 0.0;
      for (double x = 0.1; x <= 10.0; x += 0.05) {
        const double v = analytic::cdf_xd(x, k, p);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }

  TEST_CASE("outage_xd is the CDF assembly with K1(z) -> 1/z and K0 -> 0") {
    for (double db : {20.0, 30.0, 40.0}) {
      const auto p = at_db(db);
      const auto k = derive_constants(p);
      for (double x : {0.5, 1.0, 3.0, 5.0}) {
        double prod = 1.0;
        for (int b : {1, 2}) {
          const auto t = analytic::branch_terms(b, x, k, p);
          const double eta = b == 1 ? k.eta1 : k.eta2;
          const double c = b == 1 ? k.c1 : k.c2;
          const double y = x * x + 2.0 * x;
          // beta K1(beta) -> 1 and the alpha K0 terms vanish.
          const double fd = std::exp(-c * x) / (1.0 + eta * x);
          const double hd = std::exp(-c * y);
          const double l1 = std::exp(-t.beta3) / (1.0 + eta * x);
          const double l2 = hd - std::exp(-t.beta3);
          prod *= 1.0 - fd - hd + l1 + l2;
        }
        CHECK(rel(analytic::outage_xd(x, k, p), prod) < 1e-9);
      }
    }
  }

  TEST_CASE("outage_xd vanishes with power") {
    double prev = 1.0;
    for (double db = 10.0; db <= 100.0; db += 10.0) {
      const auto p = at_db(db);
      const double v = analytic::outage_xd(3.0, derive_constants(p), p);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-12);
  }

  TEST_CASE("f_helper") {
    const double v = analytic::f_helper(1.5, 1.0, 1.0, 0.01);
    CHECK(rel(v, oracle::f_helper(1.5, 1.0, 1.0, 0.01)) < 1e-8);
    // The t^2 term vanishes as t -> 0: F tends to the plain D_{-v} term.
    const double tiny = analytic::f_helper(2.5, 0.3, 0.7, 1e-9);
    const double plain = std::pow(0.6, -1.25) * specfun::gamma_fn(2.5) *
                         specfun::parabolic_cylinder_d_scaled(-2.5, (0.7 + 1e-9) / std::sqrt(0.6));
    CHECK(rel(tiny, plain) < 1e-12);
    double prev = INFINITY;
    for (double g = 0.0; g < 50.0; g += 0.5) {
      const double f = analytic::f_helper(1.5, 0.2, g, 0.05);
      CHECK(f < prev);
      prev = f;
    }
    CHECK_THROWS_AS(analytic::f_helper(1.5, 0.0, 1.0, 0.1), specfun::DomainError);
  }

  TEST_CASE("SER closed form") {
    const Modulation bpsk = Modulation::bpsk();
    const auto p = at_db(30.0);
    const auto k = derive_constants(p);
    const auto t = analytic::ser_terms(k, p, bpsk);
    CHECK(t.perturbed);
    CHECK(t.s1 == std::sqrt(std::numbers::pi / bpsk.a2));

    const double closed = analytic::ser_xd(k, p, bpsk);
    const double quad = analytic::ser_quadrature([&](double x) { return analytic::outage_xd(x, k, p); }, bpsk);
    CHECK(rel(closed, quad) < 0.05);

    const Modulation doubled{2.0, 1.0};
    CHECK(analytic::ser_xd(k, p, doubled) == Approx(2.0 * closed).epsilon(1e-14));

    const auto fd = mc::estimate_ser(Scheme::fd_a_fixed, p, bpsk, 200'000, 3);
    CHECK(closed < fd.value);

    // Distinct eta1 != eta2 goes through the unperturbed path.
    auto asym = p;
    asym.lambda = {1.0, 2.0, 2.0, 1.0};
    const auto ka = derive_constants(asym);
    CHECK_FALSE(analytic::ser_terms(ka, asym, bpsk).perturbed);
    const double qa = analytic::ser_quadrature([&](double x) { return analytic::outage_xd(x, ka, asym); }, bpsk);
    CHECK(rel(analytic::ser_xd(ka, asym, bpsk), qa) < 0.05);
  }

  TEST_CASE("FD error floor") {
    const Modulation bpsk = Modulation::bpsk();
    CHECK(rel(analytic::ser_fd_floor(0.01, bpsk), 0.00246340608776512631) < 1e-12);
    double prev = 0.0;
    for (double eta = 1e-4; eta < 1.0; eta *= 1.5) {
      const double f = analytic::ser_fd_floor(eta, bpsk);
      CHECK(f > prev);
      prev = f;
    }
    CHECK(analytic::ser_fd_floor(1e-10, bpsk) < 1e-9);
    CHECK_THROWS_AS(analytic::ser_fd_floor(0.0, bpsk), specfun::DomainError);
  }

  TEST_CASE("ser_quadrature") {
    const Modulation m{1.7, 0.6};
    CHECK(analytic::ser_quadrature([](double) { return 1.0; }, m) == Approx(m.a1 / 2.0).epsilon(1e-10));
    CHECK(analytic::ser_quadrature([](double) { return 0.0; }, m) == 0.0);

    // A step CDF from sampled SINRs reproduces the semi-analytic mean exactly.
    const auto p = at_db(10.0);
    std::vector<double> g;
    double mean_q = 0.0;
    for (std::uint64_t i = 0; i < 64; ++i) {
      TrialStream s(8, i);
      g.push_back(scheme_equivalent_sinr(Scheme::xd, sample_channels(p, s), p));
      mean_q += specfun::q_function(std::sqrt(2.0 * g.back())) / 64.0;
    }
    std::sort(g.begin(), g.end());
    auto step = [&](double x) {
      return static_cast<double>(std::upper_bound(g.begin(), g.end(), x) - g.begin()) / g.size();
    };
    CHECK(rel(analytic::ser_quadrature(step, Modulation::bpsk()), mean_q) < 1e-6);
  }

  TEST_CASE("diversity orders") {
    const auto shape = SystemParams::symmetric(1.0, 0.01);
    const double x = 3.0;
    const double d = analytic::diversity_xd(1e6, x, shape);
    CHECK(d >= 1.95);
    CHECK(d <= 2.0);
    CHECK(analytic::diversity_xd(10.0, x, shape) < 2.0);

    // -dln P_out / dln P_t of the outage approximation, step 0.01 in ln P_t.
    for (double pt = 10.0; pt <= 1e5; pt *= 1.9) {
      auto out = [&](double q) {
        const auto p = SystemParams::symmetric(q, 0.01);
        return analytic::outage_xd(x, derive_constants(p), p);
      };
      const double h = 0.005;
      const double fd = -(std::log(out(pt * std::exp(h))) - std::log(out(pt * std::exp(-h)))) / (2.0 * h);
      CHECK(std::abs(fd - analytic::diversity_xd(pt, x, shape)) < 1e-3);
    }

    using analytic::Baseline;
    CHECK(analytic::diversity_baseline(Baseline::hd_a, 1e6, x, shape) == Approx(1.0).epsilon(0.05));
    CHECK(analytic::diversity_baseline(Baseline::hy, 1e6, x, shape) == Approx(1.0).epsilon(0.05));
    CHECK(analytic::diversity_baseline(Baseline::fd_a, 1e6, x, shape) < 0.05);
    CHECK(analytic::diversity_baseline(Baseline::fd_a, 1e6, x, shape) >= 0.0);

    auto asym = shape;
    asym.lambda = {1.0, 2.0, 1.0, 1.0};
    CHECK_THROWS_AS(analytic::diversity_xd(100.0, x, asym), PreconditionError);
    CHECK_THROWS_AS(analytic::diversity_baseline(Baseline::hy, 100.0, x, asym), PreconditionError);
  }

  TEST_CASE("validity flag and clamp counter") {
    CHECK(analytic::high_snr_regime(at_db(20.0)));
    CHECK_FALSE(analytic::high_snr_regime(at_db(19.9)));
    analytic::reset_clamp_events();
    CHECK(analytic::clamp_events() == 0);
    // Far below the asymptotic region the raw forms may leave [0, 1]; outputs never do.
    for (double db = -20.0; db <= 10.0; db += 1.0) {
      const auto p = at_db(db);
      const auto k = derive_constants(p);
      for (double x : {0.5, 3.0, 20.0}) {
        const double v = analytic::cdf_xd(x, k, p);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
    CHECK(analytic::outage_threshold(2.0) == 3.0);
  }
}
