#ifndef MOLSYNC_OBSERVE_HPP
#define MOLSYNC_OBSERVE_HPP

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>

#include "molsync/channel.hpp"
#include "molsync/timeline.hpp"

namespace molsync {

using Index = Eigen::Index;

/// Pulse terms at or below this fraction of the peak are dropped from the
/// ISI superposition.
inline constexpr double kIsiFraction = 1e-6;

/// Uniform sampling instants t_n = n dt, n = 0 .. size-1.
struct SamplingGrid {
  double dt = 10e-6;
  Index size = 0;

  static SamplingGrid covering(double horizon, double dt);

  double time(Index n) const { return static_cast<double>(n) * dt; }
  double horizon() const { return time(size - 1); }
  /// Index of the first sample with t_n >= t (tolerance 1e-9 dt).
  Index first_at_or_after(double t) const;
  /// Index of the last sample with t_n <= t (tolerance 1e-9 dt).
  Index last_at_or_before(double t) const;
  /// Number of grid steps closest to a duration.
  Index steps(double duration) const;
};

struct ExpectedTrace {
  Eigen::ArrayXd a;
  Eigen::ArrayXd b;
  SamplingGrid grid;
};

struct ObservationTrace {
  Eigen::ArrayXi a;
  Eigen::ArrayXi b;
  SamplingGrid grid;
};

/// Adds model(t_n - start), without the noise floor, to out[n - first] for
/// every n >= first with t_n >= start. Terms not exceeding kIsiFraction of
/// the peak are skipped; the scan stops once the pulse tail has decayed.
void accumulate_pulse(Eigen::Ref<Eigen::ArrayXd> out, Index first,
                      const SamplingGrid& grid, const ChannelModel& model,
                      double start);

/// Expected counts with inter-symbol interference: type A sums the pulses of
/// symbols with a[k] = 1, type B sums every release; both add their floors.
ExpectedTrace expected_counts(const Timeline& timeline,
                              const ChannelModel& model_a,
                              const ChannelModel& model_b,
                              const SamplingGrid& grid);

/// Independent Poisson draws around the expected trace.
ObservationTrace sample_trace(const ExpectedTrace& expected,
                              std::uint64_t seed);

/// CSV rows (t_n, rbar_A, rbar_B, r_A, r_B).
void write_trace_csv(std::ostream& os, const ExpectedTrace& expected,
                     const ObservationTrace& observed);

}  // namespace molsync

#endif  // MOLSYNC_OBSERVE_HPP
