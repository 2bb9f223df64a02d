#include "xduplex/mc.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "xduplex/specfun.hpp"

namespace xduplex::mc {

namespace {

Tally empty_tally(const Request& request) {
  Tally t;
  t.schemes.resize(request.schemes.size());
  for (auto& s : t.schemes) s.below.assign(request.thresholds.size(), 0);
  return t;
}

void validate(const SystemParams& params, const Request& request) {
  params.validate();
  request.modulation.validate();
  if (!std::is_sorted(request.thresholds.begin(), request.thresholds.end())) {
    throw PreconditionError("mc: thresholds must be ascending");
  }
}

// Accumulates trials [first, last) into `out`. Threshold hits are binned by
// the index of the first threshold above the SINR, then made cumulative.
void accumulate(const SystemParams& params, const Request& request, std::uint64_t first, std::uint64_t last,
                std::uint64_t seed, Tally& out) {
  const auto& th = request.thresholds;
  const std::size_t n_schemes = request.schemes.size();
  std::vector<std::uint64_t> hist(n_schemes * (th.size() + 1), 0);
  const double two_a2 = 2.0 * request.modulation.a2;

  for (std::uint64_t i = first; i < last; ++i) {
    TrialStream stream(seed, i);
    const ChannelDraw draw = sample_channels(params, stream);
    const ModeDecision d = select_mode(draw, params);
    ++out.mode_counts[static_cast<int>(d.chosen)];
    for (std::size_t j = 0; j < n_schemes; ++j) {
      const Scheme s = request.schemes[j];
      const double g = scheme_equivalent_sinr(s, d);
      const auto bin = std::upper_bound(th.begin(), th.end(), g) - th.begin();
      ++hist[j * (th.size() + 1) + bin];
      const double q = specfun::q_function(std::sqrt(two_a2 * g));
      auto& st = out.schemes[j];
      st.q_sum += q;
      st.q_sq_sum += static_cast<long double>(q) * q;
      st.fd_selected += scheme_selects_fd(s, d) ? 1 : 0;
    }
  }
  out.trials += last - first;
  for (std::size_t j = 0; j < n_schemes; ++j) {
    std::uint64_t running = 0;
    for (std::size_t k = 0; k < th.size(); ++k) {
      running += hist[j * (th.size() + 1) + k];
      out.schemes[j].below[k] += running;
    }
  }
}

}  // namespace

void Tally::merge(const Tally& other) {
  for (std::size_t j = 0; j < schemes.size(); ++j) {
    auto& a = schemes[j];
    const auto& b = other.schemes[j];
    for (std::size_t k = 0; k < a.below.size(); ++k) a.below[k] += b.below[k];
    a.q_sum += b.q_sum;
    a.q_sq_sum += b.q_sq_sum;
    a.fd_selected += b.fd_selected;
  }
  for (int m = 0; m < 4; ++m) mode_counts[m] += other.mode_counts[m];
  trials += other.trials;
}

Tally simulate(const SystemParams& params, const Request& request, std::uint64_t trials, std::uint64_t seed,
               const Options& options) {
  validate(params, request);
  const std::uint64_t batch = std::max<std::uint64_t>(options.batch_size, 1);
  const auto n_batches = static_cast<std::int64_t>((trials + batch - 1) / batch);
  std::vector<Tally> partial(n_batches, empty_tally(request));
  const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t b = 0; b < n_batches; ++b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * batch;
    const std::uint64_t last = std::min(trials, first + batch);
    accumulate(params, request, first, last, seed, partial[b]);
  }

  Tally total = empty_tally(request);
  for (const auto& p : partial) total.merge(p);
  return total;
}

Tally simulate_serial(const SystemParams& params, const Request& request, std::uint64_t trials,
                      std::uint64_t seed) {
  validate(params, request);
  Tally total = empty_tally(request);
  const double two_a2 = 2.0 * request.modulation.a2;
  for (std::uint64_t i = 0; i < trials; ++i) {
    TrialStream stream(seed, i);
    const ChannelDraw draw = sample_channels(params, stream);
    const ModeDecision d = select_mode(draw, params);
    ++total.mode_counts[static_cast<int>(d.chosen)];
    for (std::size_t j = 0; j < request.schemes.size(); ++j) {
      const Scheme s = request.schemes[j];
      const double g = scheme_equivalent_sinr(s, d);
      auto& st = total.schemes[j];
      for (std::size_t k = 0; k < request.thresholds.size(); ++k) {
        if (g < request.thresholds[k]) ++st.below[k];
      }
      const double q = specfun::q_function(std::sqrt(two_a2 * g));
      st.q_sum += q;
      st.q_sq_sum += static_cast<long double>(q) * q;
      if (scheme_selects_fd(s, d)) ++st.fd_selected;
    }
  }
  total.trials = trials;
  return total;
}

McEstimate outage_estimate(const Tally& tally, std::size_t scheme_index, std::size_t threshold_index,
                           std::uint64_t seed) {
  McEstimate e;
  e.trials = tally.trials;
  e.seed = seed;
  if (tally.trials == 0) return e;
  const double n = static_cast<double>(tally.trials);
  e.value = static_cast<double>(tally.schemes.at(scheme_index).below.at(threshold_index)) / n;
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / n);
  return e;
}

McEstimate ser_estimate(const Tally& tally, std::size_t scheme_index, const Modulation& mod, std::uint64_t seed) {
  McEstimate e;
  e.trials = tally.trials;
  e.seed = seed;
  if (tally.trials == 0) return e;
  const auto& st = tally.schemes.at(scheme_index);
  const long double n = tally.trials;
  const long double mean = st.q_sum / n;
  e.value = static_cast<double>(mod.a1 * mean);
  if (tally.trials > 1) {
    const long double var = std::max(0.0L, (st.q_sq_sum - n * mean * mean) / (n - 1));
    e.std_error = static_cast<double>(mod.a1 * std::sqrt(var / n));
  }
  return e;
}

McEstimate estimate_outage(Scheme scheme, const SystemParams& params, double threshold, std::uint64_t trials,
                           std::uint64_t seed, const Options& options) {
  if (trials < 1) throw PreconditionError("estimate_outage: trials must be >= 1");
  const Request req{{scheme}, {threshold}, Modulation::bpsk()};
  return outage_estimate(simulate(params, req, trials, seed, options), 0, 0, seed);
}

McEstimate estimate_ser(Scheme scheme, const SystemParams& params, const Modulation& mod, std::uint64_t trials,
                        std::uint64_t seed, const Options& options) {
  if (trials < 1) throw PreconditionError("estimate_ser: trials must be >= 1");
  const Request req{{scheme}, {}, mod};
  return ser_estimate(simulate(params, req, trials, seed, options), 0, mod, seed);
}

std::vector<double> empirical_cdf(Scheme scheme, const SystemParams& params, std::span<const double> xs,
                                  std::uint64_t trials, std::uint64_t seed, const Options& options) {
  if (trials < 1) throw PreconditionError("empirical_cdf: trials must be >= 1");
  const Request req{{scheme}, std::vector<double>(xs.begin(), xs.end()), Modulation::bpsk()};
  const Tally t = simulate(params, req, trials, seed, options);
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out[k] = static_cast<double>(t.schemes[0].below[k]) / static_cast<double>(trials);
  }
  return out;
}

DiversityResult numeric_diversity(const SweepCurve& curve) {
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (!(curve.points[i].p_t > curve.points[i - 1].p_t)) {
      throw PreconditionError("numeric_diversity: p_t must be strictly increasing");
    }
  }
  DiversityResult r;
  std::vector<double> pt, lp, lv;
  for (const auto& p : curve.points) {
    if (p.value > 0.0 && std::isfinite(p.value) && p.p_t > 0.0) {
      pt.push_back(p.p_t);
      lp.push_back(std::log(p.p_t));
      lv.push_back(std::log(p.value));
    } else {
      r.skipped.push_back(p.p_t);
    }
  }
  const std::size_t n = lp.size();
  if (n < 3) throw PreconditionError("numeric_diversity: need at least 3 positive points");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    r.points.push_back({pt[i], -(lv[hi] - lv[lo]) / (lp[hi] - lp[lo])});
  }
  return r;
}

}  // namespace xduplex::mc
