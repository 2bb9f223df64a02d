#include "xduplex/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "xduplex/analytic.hpp"
#include "xduplex/channel.hpp"
#include "xduplex/duplex.hpp"
#include "xduplex/mc.hpp"
#include "xduplex/oracle.hpp"
#include "xduplex/specfun.hpp"

namespace xduplex::selftest {

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

double rel_err(double got, double want) {
  if (got == want) return 0.0;
  if (!std::isfinite(got)) return INFINITY;
  return std::abs(got - want) / std::abs(want);
}

std::string point(const char* label, double v) {
  std::ostringstream s;
  s.precision(6);
  s << label << '=' << v;
  return s.str();
}

// Tracks the worst relative error over a grid.
struct Worst {
  double err = 0.0;
  double got = 0.0;
  double want = 0.0;
  std::string where;

  void add(double got_v, double want_v, std::string at) {
    const double e = rel_err(got_v, want_v);
    if (e > err || std::isnan(e)) {
      err = std::isnan(e) ? INFINITY : e;
      got = got_v;
      want = want_v;
      where = std::move(at);
    }
  }
};

Check from_worst(std::string name, const Worst& w, double tol) {
  Check c;
  c.name = std::move(name);
  c.measured = w.got;
  c.expected = w.want;
  c.tolerance = tol;
  c.passed = w.err <= tol;
  std::ostringstream s;
  s.precision(3);
  s << "max rel err " << w.err;
  if (!w.where.empty()) s << " at " << w.where;
  c.detail = s.str();
  return c;
}

Check relative(std::string name, double got, double want, double tol, std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.measured = got;
  c.expected = want;
  c.tolerance = tol;
  const double e = rel_err(got, want);
  c.passed = e <= tol;
  std::ostringstream s;
  s.precision(3);
  s << "rel err " << e;
  if (!detail.empty()) s << ", " << detail;
  c.detail = s.str();
  return c;
}

constexpr double kOracleTol = 1e-9;

void specfun_suite(const Kernels& k, std::vector<Check>& out) {
  {
    Worst w;
    for (double x : log_grid(1e-3, 10.0, 50)) w.add(k.q_function(x), oracle::q_function(x), point("x", x));
    out.push_back(from_worst("specfun.q_function.oracle", w, kOracleTol));
  }
  {
    Worst w0, w1;
    for (double z : log_grid(1e-3, 50.0, 50)) {
      w0.add(k.bessel_k0(z), oracle::bessel_k(0, z), point("z", z));
      w1.add(k.bessel_k1(z), oracle::bessel_k(1, z), point("z", z));
    }
    out.push_back(from_worst("specfun.bessel_k0.oracle", w0, kOracleTol));
    out.push_back(from_worst("specfun.bessel_k1.oracle", w1, kOracleTol));
  }
  {
    Worst w;
    for (double a : log_grid(0.05, 30.0, 50)) w.add(k.gamma_fn(a), oracle::gamma_fn(a), point("a", a));
    out.push_back(from_worst("specfun.gamma.oracle", w, kOracleTol));
  }
  {
    Worst w;
    for (double a : {-2.5, -1.5, -0.5, 0.5, 1.5, 3.0}) {
      for (double x : log_grid(1e-2, 100.0, 50)) {
        w.add(k.upper_incomplete_gamma_scaled(a, x), oracle::upper_incomplete_gamma_scaled(a, x),
              point("a", a) + ' ' + point("x", x));
      }
    }
    out.push_back(from_worst("specfun.upper_incomplete_gamma.oracle", w, kOracleTol));
  }
  {
    Worst w;
    for (double p : {-0.5, -1.0, -1.5, -2.5, -3.5, -4.5}) {
      for (double z : log_grid(1e-2, 40.0, 50)) {
        w.add(k.parabolic_cylinder_d_scaled(p, z), oracle::parabolic_cylinder_d_scaled(p, z),
              point("p", p) + ' ' + point("z", z));
      }
    }
    out.push_back(from_worst("specfun.parabolic_cylinder_d.oracle", w, kOracleTol));
  }

  // Recurrences and structural invariants.
  {
    Worst w;
    double worst_abs = 0.0;
    std::string at;
    for (int i = 0; i <= 64; ++i) {
      const double x = -8.0 + 16.0 * i / 64.0;
      const double s = k.q_function(x) + k.q_function(-x);
      if (!(std::abs(s - 1.0) <= worst_abs)) {
        worst_abs = std::abs(s - 1.0);
        at = point("x", x);
      }
    }
    Check c;
    c.name = "specfun.q_function.symmetry";
    c.measured = 1.0 + worst_abs;
    c.expected = 1.0;
    c.tolerance = 1e-12;
    c.passed = worst_abs <= 1e-12;
    c.detail = "max |Q(x) + Q(-x) - 1| at " + at;
    out.push_back(c);
  }
  {
    bool ok = true;
    std::string at;
    double prev0 = INFINITY, prev1 = INFINITY;
    for (double z : log_grid(1e-6, 50.0, 200)) {
      const double v0 = k.bessel_k0(z), v1 = k.bessel_k1(z);
      if (!(v0 > 0.0 && v1 > 0.0 && v0 < prev0 && v1 < prev1)) {
        ok = false;
        at = point("z", z);
        break;
      }
      prev0 = v0;
      prev1 = v1;
    }
    Check c;
    c.name = "specfun.bessel_k.positive_decreasing";
    c.passed = ok;
    c.detail = ok ? "z in [1e-6, 50]" : "violated at " + at;
    out.push_back(c);
  }
  {
    Worst w;
    for (double z : {1e-4, 1e-5, 1e-6}) w.add(z * k.bessel_k1(z), 1.0, point("z", z));
    out.push_back(from_worst("specfun.bessel_k1.small_z", w, 1e-4));
  }
  {
    Worst w;
    for (double z : log_grid(0.1, 10.0, 50)) {
      const double h = 1e-4 * z;
      const double deriv = (k.bessel_k0(z + h) - k.bessel_k0(z - h)) / (2.0 * h);
      w.add(k.bessel_k1(z), -deriv, point("z", z));
    }
    out.push_back(from_worst("specfun.bessel_k1.derivative_of_k0", w, 1e-6));
  }
  {
    // e^x [Gamma(a+1,x) - a Gamma(a,x)] = x^a, relative to the largest term.
    double worst = 0.0;
    std::string at;
    for (double a : {-0.5, 0.5, 1.5}) {
      for (double x : log_grid(0.01, 20.0, 50)) {
        const double t1 = k.upper_incomplete_gamma_scaled(a + 1.0, x);
        const double t2 = a * k.upper_incomplete_gamma_scaled(a, x);
        const double t3 = std::pow(x, a);
        const double scale = std::max({std::abs(t1), std::abs(t2), t3});
        const double e = std::abs(t1 - t2 - t3) / scale;
        if (!(e <= worst)) {
          worst = e;
          at = point("a", a) + ' ' + point("x", x);
        }
      }
    }
    Check c;
    c.name = "specfun.upper_incomplete_gamma.recurrence";
    c.measured = worst;
    c.tolerance = 1e-10;
    c.passed = worst <= 1e-10;
    c.detail = "worst at " + at;
    out.push_back(c);
  }
  {
    // D_{p+1}(z) - z D_p(z) + p D_{p-1}(z) = 0 on the orders the SER form uses.
    double worst = 0.0;
    std::string at;
    for (double p : {-1.5, -2.5, -3.5}) {
      for (double z : log_grid(0.01, 30.0, 50)) {
        const double d_up = k.parabolic_cylinder_d_scaled(p + 1.0, z);
        const double d = k.parabolic_cylinder_d_scaled(p, z);
        const double d_dn = k.parabolic_cylinder_d_scaled(p - 1.0, z);
        const double scale = std::max({std::abs(d_up), std::abs(z * d), std::abs(p * d_dn)});
        const double e = std::abs(d_up - z * d + p * d_dn) / scale;
        if (!(e <= worst)) {
          worst = e;
          at = point("p", p) + ' ' + point("z", z);
        }
      }
    }
    Check c;
    c.name = "specfun.parabolic_cylinder_d.recurrence";
    c.measured = worst;
    c.tolerance = 1e-8;
    c.passed = worst <= 1e-8;
    c.detail = "worst at " + at;
    out.push_back(c);
  }
}

SystemParams symmetric_at(double db, double eta) { return SystemParams::symmetric(db_to_linear(db), eta); }

void analytic_suite(std::vector<Check>& out) {
  const double x = analytic::outage_threshold(2.0);
  const Modulation bpsk = Modulation::bpsk();
  {
    // Arguments the SER closed form hits between 20 and 40 dB.
    Worst w;
    for (double db : {20.0, 30.0, 40.0}) {
      const double c = 2.0 / db_to_linear(db);
      for (double t : {0.01, 0.0125}) {
        for (double v : {1.5, 2.5}) {
          const double gamma = 2.0 * c + 1.0 + 1.0 / (db_to_linear(db) * t);
          w.add(analytic::f_helper(v, c, gamma, t), oracle::f_helper(v, c, gamma, t),
                point("snr_db", db) + ' ' + point("t", t) + ' ' + point("v", v));
        }
      }
    }
    out.push_back(from_worst("analytic.f_helper.oracle", w, 1e-8));
  }
  {
    const SystemParams p = symmetric_at(30.0, 0.01);
    const DerivedConstants k = derive_constants(p);
    const double closed = analytic::ser_xd(k, p, bpsk);
    const double quad = analytic::ser_quadrature([&](double t) { return analytic::outage_xd(t, k, p); }, bpsk);
    out.push_back(relative("analytic.ser_closed_form.quadrature", closed, quad, 0.05, "30 dB, eta 0.01"));
  }
  {
    const double eta = 0.01;
    const double floor = analytic::ser_fd_floor(eta, bpsk);
    const double quad = analytic::ser_quadrature([eta](double t) { return eta * t / (1.0 + eta * t); }, bpsk);
    out.push_back(relative("analytic.fd_floor.quadrature", floor, quad, 1e-6, "eta 0.01"));
  }
  {
    bool ok = true;
    std::string at;
    for (double db : {10.0, 20.0, 30.0, 40.0}) {
      const SystemParams p = symmetric_at(db, 0.01);
      const DerivedConstants k = derive_constants(p);
      for (double t : {0.5, 3.0, 15.0}) {
        const double f1 = analytic::branch_cdf_factor(1, t, k, p);
        const double f2 = analytic::branch_cdf_factor(2, t, k, p);
        const double prod = std::clamp(f1 * f2, 0.0, 1.0);
        if (f1 != f2 || analytic::cdf_xd(t, k, p) != prod) {
          ok = false;
          at = point("snr_db", db) + ' ' + point("x", t);
        }
      }
    }
    Check c;
    c.name = "analytic.cdf.branch_symmetry_and_product";
    c.passed = ok;
    c.detail = ok ? "bit-identical" : "mismatch at " + at;
    out.push_back(c);
  }
  {
    const SystemParams p = SystemParams::symmetric(1.0, 0.01);
    const double d = analytic::diversity_xd(1e6, x, p);
    Check c;
    c.name = "analytic.diversity_xd.limit";
    c.measured = d;
    c.expected = 2.0;
    c.tolerance = 0.05;
    c.passed = d >= 1.95 && d <= 2.0;
    c.detail = "P_t = 1e6, x = 3";
    out.push_back(c);
  }
}

void mc_suite(const Options& opt, std::vector<Check>& out) {
  const double x = analytic::outage_threshold(2.0);
  const Modulation bpsk = Modulation::bpsk();
  {
    std::uint64_t violations = 0;
    std::string at;
    const std::uint64_t n = opt.mc_trials / 5;
    for (double db : {0.0, 10.0, 20.0, 30.0, 40.0}) {
      const SystemParams p = symmetric_at(db, 0.01);
      for (std::uint64_t i = 0; i < n; ++i) {
        TrialStream s(opt.seed, i);
        const ModeDecision d = select_mode(sample_channels(p, s), p);
        const double xd = scheme_equivalent_sinr(Scheme::xd, d);
        for (Scheme b : kAllSchemes) {
          if (scheme_equivalent_sinr(b, d) > xd) {
            if (violations++ == 0) at = point("snr_db", db) + ' ' + point("trial", static_cast<double>(i));
          }
        }
      }
    }
    Check c;
    c.name = "mc.xd_dominates_baselines";
    c.measured = static_cast<double>(violations);
    c.passed = violations == 0;
    c.detail = violations == 0 ? "5 SNR points" : "first violation at " + at;
    out.push_back(c);
  }
  {
    const SystemParams p = symmetric_at(20.0, 0.01);
    const mc::Request req{{Scheme::xd}, {x}, bpsk};
    const auto par = mc::simulate(p, req, 20'000, opt.seed, {0, 4096});
    const auto ser = mc::simulate_serial(p, req, 20'000, opt.seed);
    Check c;
    c.name = "mc.parallel_matches_serial";
    c.passed = par.schemes[0].below == ser.schemes[0].below && par.mode_counts == ser.mode_counts &&
               std::abs(static_cast<double>(par.schemes[0].q_sum - ser.schemes[0].q_sum)) <=
                   1e-12 * static_cast<double>(ser.schemes[0].q_sum);
    c.detail = "20000 trials";
    out.push_back(c);
  }
  {
    // SER of the adaptive scheme: MC against the quadrature of the CDF.
    const double db = 25.0;
    const SystemParams p = symmetric_at(db, 0.01);
    const DerivedConstants k = derive_constants(p);
    const auto est = mc::estimate_ser(Scheme::xd, p, bpsk, opt.mc_trials, opt.seed);
    const double model = analytic::ser_quadrature([&](double t) { return analytic::cdf_xd(t, k, p); }, bpsk);
    const double tol = 0.10 + 3.0 * est.std_error / est.value;
    out.push_back(relative("mc.ser_xd.vs_analytic", est.value, model, tol,
                           point("snr_db", db) + ' ' + point("mc_stderr", est.std_error)));
  }
  {
    const double db = 15.0;
    const SystemParams p = symmetric_at(db, 0.01);
    const DerivedConstants k = derive_constants(p);
    const auto est = mc::estimate_outage(Scheme::xd, p, x, opt.mc_trials, opt.seed);
    const double model = analytic::cdf_xd(x, k, p);
    const double tol = 0.10 + 3.0 * est.std_error / est.value;
    out.push_back(relative("mc.outage_xd.vs_analytic", est.value, model, tol,
                           point("snr_db", db) + ' ' + point("mc_stderr", est.std_error)));
  }
  {
    const double eta = 0.01;
    const SystemParams p = symmetric_at(60.0, eta);
    const auto est = mc::estimate_ser(Scheme::fd_a_fixed, p, bpsk, opt.mc_trials, opt.seed);
    const double floor = analytic::ser_fd_floor(eta, bpsk);
    const double tol = 0.05 + 3.0 * est.std_error / est.value;
    out.push_back(relative("mc.ser_fd_a.floor", est.value, floor, tol, "60 dB"));
  }
}

}  // namespace

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

void Report::print(std::ostream& out) const {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << "  (" << c.detail << ')';
    if (!c.passed) out << "  measured " << c.measured << ", expected " << c.expected << ", tolerance " << c.tolerance;
    out << '\n';
  }
  out << (failures() == 0 ? "selftest: all " : "selftest: ") << (failures() == 0 ? checks.size() : failures())
      << (failures() == 0 ? " checks passed\n" : " of " + std::to_string(checks.size()) + " checks failed\n");
}

Kernels Kernels::production() {
  Kernels k;
  k.q_function = [](double x) { return specfun::q_function(x); };
  k.bessel_k0 = [](double z) { return specfun::bessel_k0(z); };
  k.bessel_k1 = [](double z) { return specfun::bessel_k1(z); };
  k.gamma_fn = [](double a) { return specfun::gamma_fn(a); };
  k.upper_incomplete_gamma_scaled = [](double a, double x) { return specfun::upper_incomplete_gamma_scaled(a, x); };
  k.parabolic_cylinder_d_scaled = [](double p, double z) { return specfun::parabolic_cylinder_d_scaled(p, z); };
  return k;
}

Report run(const Options& options) {
  Report r;
  if (options.run_specfun) specfun_suite(options.kernels, r.checks);
  if (options.run_analytic) analytic_suite(r.checks);
  if (options.run_mc) mc_suite(options, r.checks);
  return r;
}

}  // namespace xduplex::selftest
