#ifndef MOLSYNC_TIMELINE_HPP
#define MOLSYNC_TIMELINE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace molsync {

/// Symbol interval lengths are drawn from [t_min, t_max]; a block holds
/// `symbols` intervals.
struct IntervalSpec {
  double t_min = 0.8e-3;
  double t_max = 1.2e-3;
  int symbols = 50;

  void validate() const;
  /// t_max <= 2 t_min, required by symbol-by-symbol ML synchronization.
  bool ml_compatible() const { return t_max <= 2.0 * t_min; }
  double mean_interval() const { return 0.5 * (t_min + t_max); }
};

/// True symbol starts and data bits of one block. starts[0] == 0.
struct Timeline {
  std::vector<double> starts;
  std::vector<std::uint8_t> symbols;
  IntervalSpec spec;

  std::size_t size() const { return starts.size(); }
  bool empty() const { return starts.empty(); }
};

struct TimelineSeeds {
  std::uint64_t timing = 0;
  std::uint64_t symbols = 0;
};

Timeline sample_timeline(const IntervalSpec& spec, TimelineSeeds seeds);
inline Timeline sample_timeline(const IntervalSpec& spec, std::uint64_t seed) {
  return sample_timeline(spec, {seed, seed ^ 0x9e3779b97f4a7c15ULL});
}

/// Validates and wraps a given realization. Throws std::invalid_argument for
/// non-increasing starts, increments outside [t_min, t_max], a nonzero first
/// start, or mismatched lengths.
Timeline fixed_timeline(std::span<const double> starts,
                        std::span<const std::uint8_t> symbols,
                        const IntervalSpec& spec);

}  // namespace molsync

#endif  // MOLSYNC_TIMELINE_HPP
