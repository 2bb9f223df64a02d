#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "xduplex/sweep.hpp"

using namespace xduplex;
using namespace xduplex::sweep;
using doctest::Approx;

namespace {

std::vector<std::string> lines_of(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

// Column name -> values, parsed from a wide figure table.
std::map<std::string, std::vector<double>> columns(const std::string& csv) {
  const auto ls = lines_of(csv);
  const auto head = fields(ls.at(0));
  std::map<std::string, std::vector<double>> cols;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    REQUIRE(f.size() == head.size());
    for (std::size_t j = 0; j < f.size(); ++j) cols[head[j]].push_back(f[j].empty() ? NAN : std::stod(f[j]));
  }
  return cols;
}

SweepConfig small(double start, double stop, double step, std::uint64_t trials) {
  SweepConfig c;
  c.snr_db_start = start;
  c.snr_db_stop = stop;
  c.snr_db_step = step;
  c.trials = trials;
  return c;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("config text parsing") {
    const auto c = parse_config(
        "# comment\n"
        "snr_start = 10\n"
        "snr-stop=30 ; trailing\n"
        "  snr-step = 2.5\n"
        "schemes = xd, fd-a,hy\n"
        "eta = 0.05\n"
        "trials = 1e5\n"
        "seed = 9\n"
        "modulation = qpsk\n"
        "lambdas = 1, 2, 0.5, 1\n"
        "out = /tmp/x.csv\n");
    CHECK(c.snr_db_start == 10.0);
    CHECK(c.snr_db_stop == 30.0);
    CHECK(c.snr_db_step == 2.5);
    REQUIRE(c.schemes.size() == 3);
    CHECK(c.schemes[1] == Scheme::fd_a_fixed);
    CHECK(c.eta == 0.05);
    CHECK(c.trials == 100'000);
    CHECK(c.seed == 9);
    CHECK(c.modulation.a2 == 0.5);
    CHECK(c.lambdas[1] == 2.0);
    CHECK(c.output_path == "/tmp/x.csv");
    CHECK(c.snr_points_db().size() == 9);
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("[sweep]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("eta 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schemes = xd, qd\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schemes =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("eta = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("eta = -1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("snr-start = 40\nsnr-stop = 10\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("snr-step = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("trials = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("lambdas = 1, 1, 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("modulation = 16qam\n"), ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/dir/cfg.ini"), IoError);
  }

  TEST_CASE("inclusive SNR grid and per-point parameters") {
    const auto c = small(0.0, 50.0, 5.0, 1);
    const auto g = c.snr_points_db();
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 50.0);
    const auto p = c.params_at(30.0);
    CHECK(p.p_s == Approx(1000.0));
    CHECK(p.p_r == p.p_s);
    CHECK(p.lambda_rsi[0] == Approx(0.01));
    CHECK(c.threshold() == 3.0);
  }

  TEST_CASE("single trial single point still produces a full table") {
    auto c = small(20.0, 25.0, 5.0, 1);
    c.snr_db_stop = 20.0 + 1e-9;
    const auto recs = run_sweep(c);
    CHECK(recs.size() == c.snr_points_db().size() * c.schemes.size());
    const auto csv = metrics_csv(recs);
    const auto ls = lines_of(csv);
    CHECK(ls.size() == recs.size() + 1);
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(fields(ls[i]).size() == fields(ls[0]).size());
  }

  TEST_CASE("metrics header is stable and runs are reproducible") {
    auto c = small(20.0, 30.0, 10.0, 20'000);
    const auto a = metrics_csv(run_sweep(c));
    CHECK(lines_of(a).at(0) ==
          "snr_db,scheme,outage_mc,outage_mc_stderr,outage_analytic,ser_mc,ser_mc_stderr,ser_analytic,"
          "diversity_analytic,diversity_numeric,fd_select_fraction,trials,seed,validity_flag");
    c.workers = 2;
    CHECK(metrics_csv(run_sweep(c)) == a);
  }

  TEST_CASE("scheme orderings hold at every point") {
    auto c = small(0.0, 40.0, 10.0, 200'000);
    const auto recs = run_sweep(c);
    for (std::size_t i = 0; i < recs.size(); i += c.schemes.size()) {
      std::map<Scheme, const MetricRecord*> by;
      for (std::size_t j = 0; j < c.schemes.size(); ++j) by[recs[i + j].scheme] = &recs[i + j];
      auto le = [&](Scheme a, Scheme b) {
        CHECK(by[a]->outage_mc <= by[b]->outage_mc);
        CHECK(by[a]->ser_mc <= by[b]->ser_mc);
      };
      le(Scheme::xd, Scheme::rams);
      le(Scheme::rams, Scheme::fd_a_fixed);
      le(Scheme::xd, Scheme::hy);
      le(Scheme::hy, Scheme::hd_a_fixed);
      CHECK(by[Scheme::xd]->validity_flag == (recs[i].snr_db >= 20.0));
      CHECK(by[Scheme::xd]->outage_analytic.has_value());
      CHECK_FALSE(by[Scheme::rams]->outage_analytic.has_value());
    }
  }

  TEST_CASE("diversity figure trends") {
    auto c = small(0.0, 50.0, 5.0, 200'000);
    c.schemes = {Scheme::xd, Scheme::fd_a_fixed, Scheme::hd_a_fixed};
    const auto cols = columns(figure_csv(FigureKind::diversity, c));
    const auto& xd = cols.at("xd_analytic");
    const auto& fd = cols.at("fd-a_analytic");
    REQUIRE(xd.size() == 11);
    // Past the FD/HD crossover the adaptive order climbs monotonically toward 2.
    for (std::size_t i = 6; i < xd.size(); ++i) CHECK(xd[i] > xd[i - 1]);
    CHECK(xd.back() > 1.9);
    CHECK(xd.back() <= 2.0);
    // FD-only diversity peaks at a finite SNR and then decays toward zero.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < fd.size(); ++i) {
      if (fd[i] > fd[peak]) peak = i;
    }
    CHECK(peak > 0);
    CHECK(peak + 1 < fd.size());
    CHECK(fd.back() < 0.1);
    CHECK(cols.count("xd_numeric") == 1);
  }

  TEST_CASE("SER figure: FD flattens onto its floor") {
    auto c = small(30.0, 60.0, 10.0, 300'000);
    c.schemes = {Scheme::xd, Scheme::fd_a_fixed};
    const auto cols = columns(figure_csv(FigureKind::ser, c));
    const auto& fd = cols.at("fd-a_mc");
    const double floor = cols.at("fd_floor").front();
    CHECK(fd.back() == Approx(floor).epsilon(0.1));
    CHECK(std::abs(fd[3] - fd[2]) < 0.15 * fd[3]);
    for (std::size_t i = 0; i < fd.size(); ++i) CHECK(cols.at("xd_mc")[i] < fd[i]);
  }

  TEST_CASE("output handling") {
    SweepConfig c = small(20.0, 25.0, 5.0, 10);
    c.schemes.clear();
    CHECK_THROWS_AS(run_sweep(c), ConfigError);
    std::ostringstream sink;
    CHECK_THROWS_AS(emit("x\n", "/nonexistent/dir/out.csv", sink), IoError);
    emit("abc\n", "", sink);
    CHECK(sink.str() == "abc\n");
    CHECK(format_number(0.1) == "0.1");
    CHECK(parse_figure_kind("outage") == FigureKind::outage);
    CHECK_FALSE(parse_figure_kind("capacity").has_value());
  }

  TEST_CASE("mode fractions sum to one") {
    const auto c = small(0.0, 40.0, 20.0, 50'000);
    const auto ls = lines_of(modes_csv(c));
    CHECK(ls.at(0) == "snr_db,fd-a,fd-b,hd-a,hd-b,fd_total");
    REQUIRE(ls.size() == 4);
    for (std::size_t i = 1; i < ls.size(); ++i) {
      const auto f = fields(ls[i]);
      const double sum = std::stod(f[1]) + std::stod(f[2]) + std::stod(f[3]) + std::stod(f[4]);
      CHECK(sum == Approx(1.0).epsilon(1e-12));
      CHECK(std::stod(f[5]) == Approx(std::stod(f[1]) + std::stod(f[2])).epsilon(1e-12));
    }
  }
}
