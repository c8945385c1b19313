#include "molsync/detect.hpp"

#include <stdexcept>
#include <string>

namespace molsync {

std::string_view to_string(DetectorKind d) {
  return d == DetectorKind::mean ? "mean" : "peak";
}

DetectorKind parse_detector(std::string_view name) {
  if (name == "mean") return DetectorKind::mean;
  if (name == "peak") return DetectorKind::peak;
  throw std::invalid_argument("unknown detector: " + std::string(name));
}

void DetectorConfig::validate() const {
  if (!(threshold > 0.0)) throw std::invalid_argument("detection threshold must be positive");
}

std::pair<Index, Index> DetectionInterval::samples(const SamplingGrid& grid) const {
  const Index first = std::max<Index>(grid.first_at_or_after(start), 0);
  Index last = closed ? grid.last_at_or_before(end)
                      : grid.first_at_or_after(end) - 1;
  last = std::min(last, grid.size - 1);
  return {first, last};
}

std::vector<DetectionInterval> intervals_from_sync(const SyncResult& result,
                                                   const IntervalSpec& spec,
                                                   const SamplingGrid& grid) {
  std::vector<DetectionInterval> out;
  if (result.scheme == Scheme::tt) {
    out.reserve(result.zones.size());
    for (const Zone& z : result.zones) {
      out.push_back({grid.time(z.first), grid.time(z.last), true});
    }
    return out;
  }
  const auto& s = result.starts;
  out.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double end = k + 1 < s.size() ? s[k + 1] : s[k] + spec.mean_interval();
    out.push_back({s[k], end, false});
  }
  return out;
}

namespace {

std::pair<Index, Index> checked_samples(const ObservationTrace& trace,
                                        const DetectionInterval& iv) {
  const auto range = iv.samples(trace.grid);
  if (range.second < range.first) {
    throw std::invalid_argument("detection interval holds no samples");
  }
  return range;
}

}  // namespace

double interval_mean(const ObservationTrace& trace, const DetectionInterval& iv) {
  const auto [first, last] = checked_samples(trace, iv);
  const Index n = last - first + 1;
  return static_cast<double>(trace.a.segment(first, n).sum()) /
         static_cast<double>(n);
}

int interval_peak(const ObservationTrace& trace, const DetectionInterval& iv) {
  const auto [first, last] = checked_samples(trace, iv);
  return trace.a.segment(first, last - first + 1).maxCoeff();
}

double detector_statistic(const ObservationTrace& trace,
                          const DetectionInterval& iv, DetectorKind kind) {
  return kind == DetectorKind::mean ? interval_mean(trace, iv)
                                    : static_cast<double>(interval_peak(trace, iv));
}

bool detect(const ObservationTrace& trace, const DetectionInterval& iv,
            const DetectorConfig& cfg) {
  return detector_statistic(trace, iv, cfg.kind) >= cfg.threshold;
}

}  // namespace molsync
