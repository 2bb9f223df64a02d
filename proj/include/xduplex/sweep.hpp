#pragma once

// SNR sweeps over the compared schemes: configuration, per-point metric
// records from both engines, and the plot-ready CSV tables behind the
// `sweep`, `figure` and `modes` subcommands.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xduplex/channel.hpp"
#include "xduplex/duplex.hpp"

namespace xduplex::sweep {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  double snr_db_start = 0.0;
  double snr_db_stop = 50.0;
  double snr_db_step = 5.0;
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  double eta = 0.01;
  std::array<double, 4> lambdas{1.0, 1.0, 1.0, 1.0};
  double r0 = 2.0;
  Modulation modulation = Modulation::bpsk();
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  /// Empty writes to stdout.
  std::string output_path;
  /// OpenMP workers for the Monte Carlo kernel; 0 = runtime default.
  int workers = 0;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
  /// Inclusive SNR grid in dB.
  std::vector<double> snr_points_db() const;
  /// Channel parameters at one SNR point (P_S = P_R = 10^(dB/10), sigma2 = 1).
  SystemParams params_at(double snr_db) const;
  double threshold() const;
};

/// Applies one `key = value` setting. Keys: snr-start, snr-stop, snr-step,
/// schemes, eta, lambdas, r0, modulation, a1, a2, trials, seed, out, workers
/// (underscores accepted in place of dashes).
void apply_setting(SweepConfig& config, std::string_view key, std::string_view value);

/// Parses section-less key = value text; '#' and ';' start comments.
SweepConfig parse_config(std::string_view text, SweepConfig base = {});
SweepConfig load_config_file(const std::string& path, SweepConfig base = {});

struct MetricRecord {
  double snr_db = 0.0;
  Scheme scheme = Scheme::xd;
  double outage_mc = 0.0;
  double outage_mc_stderr = 0.0;
  std::optional<double> outage_analytic;
  double ser_mc = 0.0;
  double ser_mc_stderr = 0.0;
  std::optional<double> ser_analytic;
  std::optional<double> diversity_analytic;
  std::optional<double> diversity_numeric;
  double fd_select_fraction = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool validity_flag = false;
};

/// One record per (SNR point, scheme), point-major in config order.
std::vector<MetricRecord> run_sweep(const SweepConfig& config);

/// Fixed header and column order of MetricRecord.
std::string metrics_csv(const std::vector<MetricRecord>& records);

enum class FigureKind { ser, outage, diversity };
std::optional<FigureKind> parse_figure_kind(std::string_view name);

/// Wide plot table: one row per SNR point, one column per series.
std::string figure_csv(FigureKind kind, const SweepConfig& config);
std::string figure_csv(FigureKind kind, const SweepConfig& config, const std::vector<MetricRecord>& records);

/// Fractions of adaptive-scheme trials choosing each mode, per SNR point.
std::string modes_csv(const SweepConfig& config);

/// Writes to config.output_path, or `out` when the path is empty. Throws IoError.
void emit(const std::string& content, const std::string& path, std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace xduplex::sweep
