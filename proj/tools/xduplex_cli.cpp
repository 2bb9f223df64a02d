// xduplex: sweeps, plot tables and self-test for the adaptive duplex relay.
//
// Exit codes: 0 success, 1 invariant failure, 2 config error, 3 I/O error.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "xduplex/analytic.hpp"
#include "xduplex/selftest.hpp"
#include "xduplex/sweep.hpp"

namespace {

using xduplex::sweep::SweepConfig;

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kIo = 3 };

// Flags shared by sweep/figure/modes. Values stay as text and go through the
// same parser as the config file, flags applied after the file.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_file, "key = value config file");
    for (const char* key : {"snr-start", "snr-stop", "snr-step", "eta", "r0", "trials", "seed", "schemes", "out",
                            "workers", "lambdas", "modulation", "a1", "a2"}) {
      app->add_option_function<std::string>(
          std::string("--") + key, [this, key](const std::string& v) { values[key] = v; });
    }
  }

  SweepConfig resolve() const {
    SweepConfig c;
    if (!config_file.empty()) c = xduplex::sweep::load_config_file(config_file, c);
    for (const auto& [k, v] : values) xduplex::sweep::apply_setting(c, k, v);
    c.validate();
    return c;
  }
};

void report_clamps() {
  const auto n = xduplex::analytic::clamp_events();
  if (n > 0) std::cerr << "note: " << n << " analytic probabilities were clamped to [0, 1]\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"X-duplex AF relay: Monte Carlo and closed-form performance"};
  app.require_subcommand(1);

  ConfigFlags sweep_flags, figure_flags, modes_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "per-point metric records as CSV");
  sweep_flags.attach(sweep_cmd);

  std::string figure_kind;
  auto* figure_cmd = app.add_subcommand("figure", "plot-ready CSV: ser, outage or diversity");
  figure_cmd->add_option("kind", figure_kind, "ser | outage | diversity")->required();
  figure_flags.attach(figure_cmd);

  auto* modes_cmd = app.add_subcommand("modes", "per-SNR mode-selection fractions of the adaptive scheme");
  modes_flags.attach(modes_cmd);

  std::uint64_t selftest_trials = 100'000;
  auto* selftest_cmd = app.add_subcommand("selftest", "oracle, closed-form and reduced Monte Carlo checks");
  selftest_cmd->add_option("--trials", selftest_trials, "Monte Carlo trials for the cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*selftest_cmd) {
      xduplex::selftest::Options opt;
      opt.mc_trials = selftest_trials;
      const auto report = xduplex::selftest::run(opt);
      report.print(std::cout);
      return report.passed() ? kOk : kInvariant;
    }

    std::string content;
    std::string out_path;
    if (*sweep_cmd) {
      const SweepConfig c = sweep_flags.resolve();
      out_path = c.output_path;
      content = xduplex::sweep::metrics_csv(xduplex::sweep::run_sweep(c));
    } else if (*figure_cmd) {
      const auto kind = xduplex::sweep::parse_figure_kind(figure_kind);
      if (!kind) throw xduplex::sweep::ConfigError("unknown figure kind '" + figure_kind + "'");
      const SweepConfig c = figure_flags.resolve();
      out_path = c.output_path;
      content = xduplex::sweep::figure_csv(*kind, c);
    } else {
      const SweepConfig c = modes_flags.resolve();
      out_path = c.output_path;
      content = xduplex::sweep::modes_csv(c);
    }
    xduplex::sweep::emit(content, out_path, std::cout);
    report_clamps();
    return kOk;
  } catch (const xduplex::sweep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const xduplex::sweep::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariant;
  }
}
