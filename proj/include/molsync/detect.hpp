#ifndef MOLSYNC_DETECT_HPP
#define MOLSYNC_DETECT_HPP

#include <string_view>
#include <vector>

#include "molsync/observe.hpp"
#include "molsync/sync.hpp"

namespace molsync {

enum class DetectorKind { mean, peak };

std::string_view to_string(DetectorKind d);
DetectorKind parse_detector(std::string_view name);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::mean;
  double threshold = 4.5;  // xi_A

  void validate() const;
};

/// Sample range used to decide one symbol.
struct DetectionInterval {
  double start = 0.0;
  double end = 0.0;
  /// TT zones include their end sample; start-to-start intervals do not.
  bool closed = false;

  /// [first, last] sample indices; empty when last < first.
  std::pair<Index, Index> samples(const SamplingGrid& grid) const;
};

/// One interval per symbol for perfect/ML/PO (the last symbol ends one mean
/// interval after its start); TT zones are passed through unchanged.
std::vector<DetectionInterval> intervals_from_sync(const SyncResult& result,
                                                   const IntervalSpec& spec,
                                                   const SamplingGrid& grid);

/// Mean and maximum of r_A over an interval; throws std::invalid_argument
/// if the interval holds no samples.
double interval_mean(const ObservationTrace& trace, const DetectionInterval& iv);
int interval_peak(const ObservationTrace& trace, const DetectionInterval& iv);

inline bool detect_mean(const ObservationTrace& trace,
                        const DetectionInterval& iv, double threshold) {
  return interval_mean(trace, iv) >= threshold;
}

inline bool detect_peak(const ObservationTrace& trace,
                        const DetectionInterval& iv, double threshold) {
  return interval_peak(trace, iv) >= threshold;
}

/// Statistic the detector thresholds: mean or peak of r_A.
double detector_statistic(const ObservationTrace& trace,
                          const DetectionInterval& iv, DetectorKind kind);

bool detect(const ObservationTrace& trace, const DetectionInterval& iv,
            const DetectorConfig& cfg);

}  // namespace molsync

#endif  // MOLSYNC_DETECT_HPP
