#ifndef MOLSYNC_METRICS_HPP
#define MOLSYNC_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "molsync/sync.hpp"
#include "molsync/timeline.hpp"

namespace molsync {

/// (estimate - truth) / mean interval length.
double normalized_error(double estimate, double truth, const IntervalSpec& spec);

enum class ErrorClass { ok, deletion, insertion };

/// e > 1 is a deletion, e < -1 an insertion.
ErrorClass classify_error(double normalized);

/// Fixed-width histogram with bins centred on integer multiples of `width`.
class Histogram {
 public:
  explicit Histogram(double width = 0.05);

  void add(double value);
  void merge(const Histogram& other);

  double width() const { return width_; }
  std::uint64_t total() const { return total_; }
  const std::map<std::int64_t, std::uint64_t>& bins() const { return bins_; }

  std::int64_t bin_of(double value) const;
  double center(std::int64_t bin) const { return static_cast<double>(bin) * width_; }
  /// Count / (total * width).
  double density(std::int64_t bin) const;
  /// Most populated bin; ties resolve to the lowest bin. Requires total() > 0.
  std::int64_t mode() const;

  /// CSV rows (bin_center, density) over every bin from the lowest to the
  /// highest populated one.
  void write_csv(std::ostream& os) const;

 private:
  double width_;
  std::uint64_t total_ = 0;
  std::map<std::int64_t, std::uint64_t> bins_;
};

Histogram histogram(std::span<const double> values, double width = 0.05);

struct SyncErrorStats {
  std::vector<double> errors;  // scored normalized errors, in block order
  Histogram hist{0.05};
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t unmatched = 0;  // symbols left without any estimate (TT)

  void add(double normalized);
  void merge(const SyncErrorStats& other);
  /// Share of scored errors with |e| > limit.
  double fraction_beyond(double limit) const;
  std::uint64_t count_beyond(double limit) const;
  /// Like count_beyond, but unmatched symbols count as gross errors.
  std::uint64_t gross_count(double limit) const;
  std::uint64_t symbols() const { return errors.size() + unmatched; }
  double gross_fraction(double limit) const;
};

struct Interval95 {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval at 95 % for `successes` out of `trials`.
Interval95 wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct BerStats {
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;

  double ber() const { return bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits); }
  Interval95 interval() const { return wilson_interval(errors, bits); }
  void merge(const BerStats& other) {
    errors += other.errors;
    bits += other.bits;
  }
};

BerStats accumulate_ber(std::span<const std::uint8_t> decisions,
                        std::span<const std::uint8_t> truth);

/// Assignment of TT zones to true symbol intervals. Each symbol claims the
/// zone whose start is nearest its true start; a zone claimed by several
/// symbols goes to the nearest one and the others stay unassigned.
struct ZonePairing {
  std::vector<std::optional<std::size_t>> zone_of_symbol;
  std::uint64_t assigned = 0;
  std::uint64_t deletions = 0;   // symbols without a zone
  std::uint64_t insertions = 0;  // zones without a symbol
};

ZonePairing pair_tt_zones(std::span<const double> zone_starts,
                          const Timeline& timeline);

/// Normalized errors (and deletion/insertion counts) of one block.
/// Perfect/ML/PO score symbols 1..K-1 (symbol 0 is the known anchor); TT
/// scores every assigned zone and adds the pairing's unassigned counts.
SyncErrorStats score_sync(const SyncResult& result, const Timeline& timeline,
                          const SamplingGrid& grid, double bin_width = 0.05);

}  // namespace molsync

#endif  // MOLSYNC_METRICS_HPP
