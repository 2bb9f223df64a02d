#include "xduplex/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "xduplex/analytic.hpp"
#include "xduplex/mc.hpp"

namespace xduplex::sweep {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(',');
    const auto item = trim(s.substr(0, pos));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto t = trim(v);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(out)) {
    throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_count(std::string_view key, std::string_view v) {
  // Accept 1e6-style counts as well as plain integers.
  const double d = parse_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1e18) {
    throw ConfigError("'" + std::string(key) + "' must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(d);
}

std::string normalise_key(std::string_view key) {
  std::string k(trim(key));
  std::replace(k.begin(), k.end(), '_', '-');
  if (k.rfind("--", 0) == 0) k.erase(0, 2);
  return k;
}

// Column value for an optional analytic quantity.
std::string opt_field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

bool symmetric(const SystemParams& p) {
  return p.lambda[0] == p.lambda[1] && p.lambda[2] == p.lambda[3] && p.lambda_rsi[0] == p.lambda_rsi[1];
}

// Per-scheme MC outage curves and their numeric diversity, attached to records.
void attach_numeric_diversity(std::vector<MetricRecord>& records, const SweepConfig& config) {
  const std::size_t n_schemes = config.schemes.size();
  const auto snrs = config.snr_points_db();
  for (std::size_t j = 0; j < n_schemes; ++j) {
    mc::SweepCurve curve;
    curve.scheme = config.schemes[j];
    for (std::size_t i = 0; i < snrs.size(); ++i) {
      curve.points.push_back({db_to_linear(snrs[i]), records[i * n_schemes + j].outage_mc});
    }
    mc::DiversityResult div;
    try {
      div = mc::numeric_diversity(curve);
    } catch (const PreconditionError&) {
      continue;  // fewer than three points with observed outages
    }
    for (const auto& dp : div.points) {
      for (std::size_t i = 0; i < snrs.size(); ++i) {
        if (curve.points[i].p_t == dp.p_t) records[i * n_schemes + j].diversity_numeric = dp.order;
      }
    }
  }
}

std::optional<analytic::Baseline> baseline_of(Scheme s) {
  switch (s) {
    case Scheme::hd_a_fixed: return analytic::Baseline::hd_a;
    case Scheme::fd_a_fixed: return analytic::Baseline::fd_a;
    case Scheme::hy: return analytic::Baseline::hy;
    default: return std::nullopt;
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void SweepConfig::validate() const {
  if (!(snr_db_start < snr_db_stop)) throw ConfigError("snr-start must be below snr-stop");
  if (!(snr_db_step > 0.0)) throw ConfigError("snr-step must be positive");
  if (schemes.empty()) throw ConfigError("scheme list is empty");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("lambdas must be positive");
  }
  if (!(r0 > 0.0)) throw ConfigError("r0 must be positive");
  if (!(modulation.a1 > 0.0 && modulation.a2 > 0.0)) throw ConfigError("modulation constants must be positive");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

std::vector<double> SweepConfig::snr_points_db() const {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double db = snr_db_start + k * snr_db_step;
    if (db > snr_db_stop + 1e-9 * snr_db_step) break;
    out.push_back(db);
  }
  return out;
}

SystemParams SweepConfig::params_at(double snr_db) const {
  SystemParams p;
  p.p_s = p.p_r = db_to_linear(snr_db);
  p.lambda = lambdas;
  // Equal powers: eta_1 = lambda_R / lambda_1.
  p.lambda_rsi = {eta * lambdas[0], eta * lambdas[0]};
  return p;
}

double SweepConfig::threshold() const { return analytic::outage_threshold(r0); }

void apply_setting(SweepConfig& c, std::string_view raw_key, std::string_view value) {
  const std::string key = normalise_key(raw_key);
  value = trim(value);
  if (key == "snr-start") {
    c.snr_db_start = parse_double(key, value);
  } else if (key == "snr-stop") {
    c.snr_db_stop = parse_double(key, value);
  } else if (key == "snr-step") {
    c.snr_db_step = parse_double(key, value);
  } else if (key == "eta") {
    c.eta = parse_double(key, value);
  } else if (key == "r0") {
    c.r0 = parse_double(key, value);
  } else if (key == "trials") {
    c.trials = parse_count(key, value);
  } else if (key == "seed") {
    c.seed = parse_count(key, value);
  } else if (key == "workers") {
    c.workers = static_cast<int>(parse_count(key, value));
  } else if (key == "out" || key == "output" || key == "output-path") {
    c.output_path = std::string(value);
  } else if (key == "a1") {
    c.modulation.a1 = parse_double(key, value);
  } else if (key == "a2") {
    c.modulation.a2 = parse_double(key, value);
  } else if (key == "modulation") {
    if (value == "bpsk") {
      c.modulation = Modulation::bpsk();
    } else if (value == "qpsk") {
      c.modulation = {1.0, 0.5};
    } else {
      throw ConfigError("unknown modulation '" + std::string(value) + "' (bpsk, qpsk, or set a1/a2)");
    }
  } else if (key == "schemes") {
    std::vector<Scheme> list;
    for (auto name : split_list(value)) {
      const auto s = parse_scheme(name);
      if (!s) throw ConfigError("unknown scheme '" + std::string(name) + "'");
      list.push_back(*s);
    }
    if (list.empty()) throw ConfigError("scheme list is empty");
    c.schemes = std::move(list);
  } else if (key == "lambdas") {
    const auto items = split_list(value);
    if (items.size() != 4) throw ConfigError("lambdas needs four comma-separated values");
    for (int i = 0; i < 4; ++i) c.lambdas[i] = parse_double(key, items[i]);
  } else {
    throw ConfigError("unknown config key '" + std::string(raw_key) + "'");
  }
}

SweepConfig parse_config(std::string_view text, SweepConfig base) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    const auto comment = line.find_first_of("#;");
    line = trim(line.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') throw ConfigError("line " + std::to_string(line_no) + ": sections are not supported");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

SweepConfig load_config_file(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::vector<MetricRecord> run_sweep(const SweepConfig& config) {
  config.validate();
  const double x = config.threshold();
  const auto snrs = config.snr_points_db();
  mc::Options opt;
  opt.workers = config.workers;

  std::vector<MetricRecord> records;
  for (double db : snrs) {
    const SystemParams params = config.params_at(db);
    const DerivedConstants consts = derive_constants(params);
    const mc::Request req{config.schemes, {x}, config.modulation};
    // Same seed at every point: common random numbers across the sweep.
    const mc::Tally tally = mc::simulate(params, req, config.trials, config.seed, opt);

    for (std::size_t j = 0; j < config.schemes.size(); ++j) {
      MetricRecord r;
      r.snr_db = db;
      r.scheme = config.schemes[j];
      const auto out = mc::outage_estimate(tally, j, 0, config.seed);
      const auto ser = mc::ser_estimate(tally, j, config.modulation, config.seed);
      r.outage_mc = out.value;
      r.outage_mc_stderr = out.std_error;
      r.ser_mc = ser.value;
      r.ser_mc_stderr = ser.std_error;
      r.fd_select_fraction = static_cast<double>(tally.schemes[j].fd_selected) / static_cast<double>(config.trials);
      r.trials = config.trials;
      r.seed = config.seed;
      r.validity_flag = analytic::high_snr_regime(params);
      if (r.scheme == Scheme::xd) {
        r.outage_analytic = analytic::outage_xd(x, consts, params);
        r.ser_analytic = analytic::ser_xd(consts, params, config.modulation);
        if (symmetric(params)) r.diversity_analytic = analytic::diversity_xd(params.p_s, x, params);
      } else if (const auto b = baseline_of(r.scheme); b && symmetric(params)) {
        r.diversity_analytic = analytic::diversity_baseline(*b, params.p_s, x, params);
      }
      records.push_back(r);
    }
  }
  attach_numeric_diversity(records, config);
  return records;
}

std::string metrics_csv(const std::vector<MetricRecord>& records) {
  std::string out =
      "snr_db,scheme,outage_mc,outage_mc_stderr,outage_analytic,ser_mc,ser_mc_stderr,ser_analytic,"
      "diversity_analytic,diversity_numeric,fd_select_fraction,trials,seed,validity_flag\n";
  for (const auto& r : records) {
    out += format_number(r.snr_db) + ',' + std::string(scheme_name(r.scheme)) + ',' + format_number(r.outage_mc) +
           ',' + format_number(r.outage_mc_stderr) + ',' + opt_field(r.outage_analytic) + ',' +
           format_number(r.ser_mc) + ',' + format_number(r.ser_mc_stderr) + ',' + opt_field(r.ser_analytic) + ',' +
           opt_field(r.diversity_analytic) + ',' + opt_field(r.diversity_numeric) + ',' +
           format_number(r.fd_select_fraction) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.seed) +
           ',' + (r.validity_flag ? "1" : "0") + '\n';
  }
  return out;
}

std::optional<FigureKind> parse_figure_kind(std::string_view name) {
  if (name == "ser") return FigureKind::ser;
  if (name == "outage") return FigureKind::outage;
  if (name == "diversity") return FigureKind::diversity;
  return std::nullopt;
}

std::string figure_csv(FigureKind kind, const SweepConfig& config) {
  return figure_csv(kind, config, run_sweep(config));
}

std::string figure_csv(FigureKind kind, const SweepConfig& config, const std::vector<MetricRecord>& records) {
  config.validate();
  const auto snrs = config.snr_points_db();
  const std::size_t n = config.schemes.size();
  if (records.size() != snrs.size() * n) throw ConfigError("figure: records do not match the config grid");
  const bool has_xd = std::find(config.schemes.begin(), config.schemes.end(), Scheme::xd) != config.schemes.end();
  const double x = config.threshold();

  std::string out = "snr_db";
  const char* suffix = kind == FigureKind::diversity ? "_numeric" : "_mc";
  for (Scheme s : config.schemes) out += ',' + std::string(scheme_name(s)) + suffix;
  std::vector<Scheme> analytic_series;
  if (kind == FigureKind::diversity) {
    for (Scheme s : config.schemes) {
      if (s == Scheme::xd || baseline_of(s)) analytic_series.push_back(s);
    }
    for (Scheme s : analytic_series) out += ',' + std::string(scheme_name(s)) + "_analytic";
  } else if (has_xd) {
    out += ",xd_analytic";
    if (kind == FigureKind::outage) out += ",xd_cdf";
  }
  if (kind == FigureKind::ser) out += ",fd_floor";
  out += '\n';

  const double floor = analytic::ser_fd_floor(config.eta, config.modulation);
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    const auto row = std::span(records).subspan(i * n, n);
    out += format_number(snrs[i]);
    for (const auto& r : row) {
      switch (kind) {
        case FigureKind::ser: out += ',' + format_number(r.ser_mc); break;
        case FigureKind::outage: out += ',' + format_number(r.outage_mc); break;
        case FigureKind::diversity: out += ',' + opt_field(r.diversity_numeric); break;
      }
    }
    if (kind == FigureKind::diversity) {
      for (Scheme s : analytic_series) {
        const auto it = std::find_if(row.begin(), row.end(), [s](const MetricRecord& r) { return r.scheme == s; });
        out += ',' + opt_field(it->diversity_analytic);
      }
    } else if (has_xd) {
      const auto it =
          std::find_if(row.begin(), row.end(), [](const MetricRecord& r) { return r.scheme == Scheme::xd; });
      if (kind == FigureKind::ser) {
        out += ',' + opt_field(it->ser_analytic);
      } else {
        const SystemParams params = config.params_at(snrs[i]);
        out += ',' + opt_field(it->outage_analytic) + ',' +
               format_number(analytic::cdf_xd(x, derive_constants(params), params));
      }
    }
    if (kind == FigureKind::ser) out += ',' + format_number(floor);
    out += '\n';
  }
  return out;
}

std::string modes_csv(const SweepConfig& config) {
  config.validate();
  mc::Options opt;
  opt.workers = config.workers;
  std::string out = "snr_db,fd-a,fd-b,hd-a,hd-b,fd_total\n";
  for (double db : config.snr_points_db()) {
    const mc::Request req{{Scheme::xd}, {}, config.modulation};
    const auto t = mc::simulate(config.params_at(db), req, config.trials, config.seed, opt);
    const double n = static_cast<double>(t.trials);
    out += format_number(db);
    for (int m = 0; m < 4; ++m) out += ',' + format_number(t.mode_counts[m] / n);
    out += ',' + format_number((t.mode_counts[0] + t.mode_counts[1]) / n) + '\n';
  }
  return out;
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing output file '" + path + "'");
}

}  // namespace xduplex::sweep
