#include "molsync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace molsync {

double normalized_error(double estimate, double truth, const IntervalSpec& spec) {
  return (estimate - truth) / spec.mean_interval();
}

ErrorClass classify_error(double normalized) {
  if (normalized > 1.0) return ErrorClass::deletion;
  if (normalized < -1.0) return ErrorClass::insertion;
  return ErrorClass::ok;
}

Histogram::Histogram(double width) : width_(width) {
  if (!(width > 0.0)) throw std::invalid_argument("histogram bin width must be positive");
}

std::int64_t Histogram::bin_of(double value) const {
  return static_cast<std::int64_t>(std::floor(value / width_ + 0.5));
}

void Histogram::add(double value) {
  ++bins_[bin_of(value)];
  ++total_;
}

void Histogram::merge(const Histogram& other) {
  if (other.width_ != width_) throw std::invalid_argument("histogram widths differ");
  for (const auto& [bin, count] : other.bins_) bins_[bin] += count;
  total_ += other.total_;
}

double Histogram::density(std::int64_t bin) const {
  const auto it = bins_.find(bin);
  if (it == bins_.end() || total_ == 0) return 0.0;
  return static_cast<double>(it->second) / (static_cast<double>(total_) * width_);
}

std::int64_t Histogram::mode() const {
  if (bins_.empty()) throw std::logic_error("mode of an empty histogram");
  auto best = bins_.begin();
  for (auto it = bins_.begin(); it != bins_.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

void Histogram::write_csv(std::ostream& os) const {
  os << "bin_center,density\n";
  if (bins_.empty()) return;
  for (auto b = bins_.begin()->first; b <= bins_.rbegin()->first; ++b) {
    os << center(b) << ',' << density(b) << '\n';
  }
}

Histogram histogram(std::span<const double> values, double width) {
  Histogram h(width);
  for (double v : values) h.add(v);
  return h;
}

void SyncErrorStats::add(double normalized) {
  errors.push_back(normalized);
  hist.add(normalized);
  switch (classify_error(normalized)) {
    case ErrorClass::deletion: ++deletions; break;
    case ErrorClass::insertion: ++insertions; break;
    case ErrorClass::ok: break;
  }
}

void SyncErrorStats::merge(const SyncErrorStats& other) {
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
  hist.merge(other.hist);
  deletions += other.deletions;
  insertions += other.insertions;
  unmatched += other.unmatched;
}

std::uint64_t SyncErrorStats::count_beyond(double limit) const {
  return static_cast<std::uint64_t>(std::count_if(
      errors.begin(), errors.end(), [limit](double e) { return std::abs(e) > limit; }));
}

double SyncErrorStats::fraction_beyond(double limit) const {
  if (errors.empty()) return 0.0;
  return static_cast<double>(count_beyond(limit)) / static_cast<double>(errors.size());
}

std::uint64_t SyncErrorStats::gross_count(double limit) const {
  return count_beyond(limit) + unmatched;
}

double SyncErrorStats::gross_fraction(double limit) const {
  if (symbols() == 0) return 0.0;
  return static_cast<double>(gross_count(limit)) / static_cast<double>(symbols());
}

Interval95 wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

BerStats accumulate_ber(std::span<const std::uint8_t> decisions,
                        std::span<const std::uint8_t> truth) {
  if (decisions.size() != truth.size()) {
    throw std::invalid_argument("decision and truth lengths differ");
  }
  BerStats s;
  s.bits = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if ((decisions[i] != 0) != (truth[i] != 0)) ++s.errors;
  }
  return s;
}

ZonePairing pair_tt_zones(std::span<const double> zone_starts,
                          const Timeline& timeline) {
  const std::size_t symbols = timeline.size();
  ZonePairing out;
  out.zone_of_symbol.assign(symbols, std::nullopt);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(zone_starts.size(), kNone);
  std::vector<double> owner_dist(zone_starts.size(), 0.0);

  for (std::size_t k = 0; k < symbols && !zone_starts.empty(); ++k) {
    const double t = timeline.starts[k];
    const auto it = std::lower_bound(zone_starts.begin(), zone_starts.end(), t);
    std::size_t z = static_cast<std::size_t>(it - zone_starts.begin());
    if (z == zone_starts.size()) {
      z -= 1;
    } else if (z > 0 && t - zone_starts[z - 1] <= zone_starts[z] - t) {
      z -= 1;
    }
    const double d = std::abs(zone_starts[z] - t);
    if (owner[z] == kNone || d < owner_dist[z]) {
      owner[z] = k;
      owner_dist[z] = d;
    }
  }
  for (std::size_t z = 0; z < owner.size(); ++z) {
    if (owner[z] == kNone) {
      ++out.insertions;
    } else {
      out.zone_of_symbol[owner[z]] = z;
      ++out.assigned;
    }
  }
  out.deletions = symbols - out.assigned;
  return out;
}

SyncErrorStats score_sync(const SyncResult& result, const Timeline& timeline,
                          const SamplingGrid& grid, double bin_width) {
  SyncErrorStats stats;
  stats.hist = Histogram(bin_width);
  const IntervalSpec& spec = timeline.spec;
  if (result.scheme != Scheme::tt) {
    for (std::size_t k = 1; k < timeline.size() && k < result.starts.size(); ++k) {
      stats.add(normalized_error(result.starts[k], timeline.starts[k], spec));
    }
    return stats;
  }
  std::vector<double> zone_starts;
  zone_starts.reserve(result.zones.size());
  for (const Zone& z : result.zones) zone_starts.push_back(grid.time(z.first));
  const ZonePairing pairing = pair_tt_zones(zone_starts, timeline);
  for (std::size_t k = 0; k < timeline.size(); ++k) {
    if (const auto z = pairing.zone_of_symbol[k]) {
      stats.add(normalized_error(zone_starts[*z], timeline.starts[k], spec));
    }
  }
  stats.deletions += pairing.deletions;
  stats.insertions += pairing.insertions;
  stats.unmatched += pairing.deletions;
  return stats;
}

}  // namespace molsync
