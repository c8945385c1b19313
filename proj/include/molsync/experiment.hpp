#ifndef MOLSYNC_EXPERIMENT_HPP
#define MOLSYNC_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molsync/config.hpp"
#include "molsync/metrics.hpp"
#include "molsync/observe.hpp"

namespace molsync {

/// Synchronization-error cell: scheme, plus xi_B for TT (0 otherwise).
struct SyncKey {
  Scheme scheme = Scheme::perfect;
  double xi_b = 0.0;
  auto operator<=>(const SyncKey&) const = default;
};

/// BER cell of the sweep grid.
struct BerKey {
  Scheme scheme = Scheme::perfect;
  DetectorKind detector = DetectorKind::mean;
  double xi_a = 0.0;
  double xi_b = 0.0;
  auto operator<=>(const BerKey&) const = default;
};

struct BlockOutcome {
  std::map<SyncKey, SyncErrorStats> sync;
  std::map<BerKey, BerStats> ber;
};

struct SweepResult {
  std::map<SyncKey, SyncErrorStats> sync;
  std::map<BerKey, BerStats> ber;
  std::uint64_t blocks = 0;
  std::uint64_t ml_blocks = 0;

  void merge(const BlockOutcome& block);

  /// Lowest-BER cell for a scheme/detector pair, optionally at a fixed
  /// xi_B. Ties keep the smallest key.
  std::pair<BerKey, BerStats> best(Scheme scheme, DetectorKind detector,
                                   std::optional<double> xi_b = std::nullopt) const;

  /// Sync statistics of a scheme at the xi_B of its lowest-BER cell.
  const SyncErrorStats& sync_at_best(Scheme scheme, DetectorKind detector) const;
};

/// Error raised while simulating one block; carries the block index.
class BlockError : public std::runtime_error {
 public:
  BlockError(std::uint64_t block, const std::string& what)
      : std::runtime_error("block " + std::to_string(block) + ": " + what),
        block_(block) {}
  std::uint64_t block() const { return block_; }

 private:
  std::uint64_t block_;
};

/// Per-block random streams derived from the base seeds and block index.
struct BlockSeeds {
  TimelineSeeds timeline;
  std::uint64_t noise = 0;
};
BlockSeeds block_seeds(const ExperimentConfig& cfg, std::uint64_t block);

/// Grid long enough for every scheme's search windows on `timeline`.
SamplingGrid grid_for(const Timeline& timeline, double dt);

/// Timeline, channel and observation of one block.
struct BlockData {
  Timeline timeline;
  ChannelModel model_a;
  ChannelModel model_b;
  ExpectedTrace expected;
  ObservationTrace trace;
};
BlockData simulate_block(const ExperimentConfig& cfg, std::uint64_t block);

/// Runs every configured scheme, xi_B, detector and xi_A on one block.
BlockOutcome run_block(const ExperimentConfig& cfg, std::uint64_t block);

/// Monte Carlo over cfg.blocks blocks (ML over the first cfg.ml_blocks). All
/// sweep cells of one block share its observation.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// ber.csv, sync_errors.csv and one histogram CSV per sync cell, named
/// `<prefix>ber.csv` etc. Returns the written paths.
std::vector<std::filesystem::path> write_sweep(const SweepResult& result,
                                               const std::filesystem::path& dir,
                                               const std::string& prefix = "");

/// JSON run manifest: config echo, seed, build version, wall time.
void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& file,
                    double wall_seconds,
                    const std::vector<std::filesystem::path>& outputs);

std::string build_version();

}  // namespace molsync

#endif  // MOLSYNC_EXPERIMENT_HPP
