#pragma once

// Monte Carlo estimators over i.i.d. block-fading draws.
//
// Trial i draws its channels from TrialStream(seed, i), so the set of
// realisations is fixed by (seed, trials) alone. Trials are grouped into
// fixed-size batches; each batch is reduced on its own and the batch partials
// are summed in batch order, which makes every estimate bit-identical for any
// number of OpenMP workers.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "xduplex/channel.hpp"
#include "xduplex/duplex.hpp"

namespace xduplex::mc {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

struct Options {
  /// 0 keeps the OpenMP default.
  int workers = 0;
  std::uint64_t batch_size = 65536;
};

/// What one simulation pass accumulates.
struct Request {
  std::vector<Scheme> schemes;
  /// Ascending outage thresholds on the equivalent SINR.
  std::vector<double> thresholds;
  Modulation modulation = Modulation::bpsk();
};

struct SchemeTally {
  /// below[k] = number of trials with equivalent SINR < thresholds[k].
  std::vector<std::uint64_t> below;
  long double q_sum = 0.0L;     // sum of Q(sqrt(2 a2 gamma))
  long double q_sq_sum = 0.0L;  // sum of squares
  std::uint64_t fd_selected = 0;
};

struct Tally {
  std::vector<SchemeTally> schemes;  // parallel to Request::schemes
  std::array<std::uint64_t, 4> mode_counts{};  // adaptive choice, indexed by Mode
  std::uint64_t trials = 0;

  void merge(const Tally& other);
};

/// Parallel kernel: batches distributed over OpenMP threads.
Tally simulate(const SystemParams& params, const Request& request, std::uint64_t trials, std::uint64_t seed,
               const Options& options = {});

/// Straight single-threaded loop over trials, one accumulator. Kept as the
/// reference the batched kernel is checked against.
Tally simulate_serial(const SystemParams& params, const Request& request, std::uint64_t trials,
                      std::uint64_t seed);

/// Bernoulli estimate below[k] / trials.
McEstimate outage_estimate(const Tally& tally, std::size_t scheme_index, std::size_t threshold_index,
                           std::uint64_t seed);

/// a1 * mean Q-term, standard error from the sample variance.
McEstimate ser_estimate(const Tally& tally, std::size_t scheme_index, const Modulation& mod, std::uint64_t seed);

McEstimate estimate_outage(Scheme scheme, const SystemParams& params, double threshold, std::uint64_t trials,
                           std::uint64_t seed, const Options& options = {});

McEstimate estimate_ser(Scheme scheme, const SystemParams& params, const Modulation& mod, std::uint64_t trials,
                        std::uint64_t seed, const Options& options = {});

/// Fraction of trials with equivalent SINR below each x; xs must be ascending.
std::vector<double> empirical_cdf(Scheme scheme, const SystemParams& params, std::span<const double> xs,
                                  std::uint64_t trials, std::uint64_t seed, const Options& options = {});

struct SweepPoint {
  double p_t = 0.0;
  double value = 0.0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;  // p_t strictly increasing
  Scheme scheme = Scheme::xd;
};

struct DiversityPoint {
  double p_t = 0.0;
  double order = 0.0;
};

struct DiversityResult {
  std::vector<DiversityPoint> points;
  /// p_t of points dropped for non-positive values.
  std::vector<double> skipped;
};

/// -dln(value)/dln(p_t) by central differences, one-sided at the ends.
/// Throws PreconditionError if p_t is not strictly increasing or fewer than
/// three positive points remain.
DiversityResult numeric_diversity(const SweepCurve& curve);

}  // namespace xduplex::mc
