#include "molsync/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

#include "molsync/detect.hpp"
#include "molsync/sync.hpp"

#ifndef MOLSYNC_VERSION
#define MOLSYNC_VERSION "unknown"
#endif

namespace molsync {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t block, std::uint64_t stream) {
  return splitmix64(splitmix64(base ^ block) + stream);
}

// Decisions for one detector over the detection statistics of each symbol;
// symbols without a statistic (unpaired TT symbols) decide 0.
void score_thresholds(const ExperimentConfig& cfg, Scheme scheme, double xi_b,
                      DetectorKind detector,
                      const std::vector<std::optional<double>>& statistic,
                      const Timeline& timeline, BlockOutcome& out) {
  std::vector<std::uint8_t> decisions(timeline.size());
  for (double xi_a : cfg.xi_a.at(detector)) {
    for (std::size_t k = 0; k < timeline.size(); ++k) {
      decisions[k] = statistic[k] && *statistic[k] >= xi_a ? 1 : 0;
    }
    out.ber[{scheme, detector, xi_a, xi_b}].merge(
        accumulate_ber(decisions, timeline.symbols));
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

BlockSeeds block_seeds(const ExperimentConfig& cfg, std::uint64_t block) {
  return {{stream_seed(cfg.timing_seed, block, 1), stream_seed(cfg.symbol_seed, block, 2)},
          stream_seed(cfg.seed, block, 3)};
}

SamplingGrid grid_for(const Timeline& timeline, double dt) {
  // Estimated anchors may drift late; no estimate can pass (K-1) t_max.
  const double last = timeline.empty() ? 0.0 : timeline.starts.back();
  const double worst = static_cast<double>(std::max<std::size_t>(timeline.size(), 1) - 1) *
                       timeline.spec.t_max;
  return SamplingGrid::covering(std::max(last, worst) + 3.0 * timeline.spec.t_max, dt);
}

BlockData simulate_block(const ExperimentConfig& cfg, std::uint64_t block) {
  const BlockSeeds seeds = block_seeds(cfg, block);
  auto [model_a, model_b] = cfg.channel.build(cfg.dt);
  Timeline timeline = sample_timeline(cfg.interval, seeds.timeline);
  const SamplingGrid grid = grid_for(timeline, cfg.dt);
  ExpectedTrace expected = expected_counts(timeline, model_a, model_b, grid);
  ObservationTrace trace = sample_trace(expected, seeds.noise);
  return {std::move(timeline), std::move(model_a), std::move(model_b),
          std::move(expected), std::move(trace)};
}

BlockOutcome run_block(const ExperimentConfig& cfg, std::uint64_t block) {
  try {
    const BlockData d = simulate_block(cfg, block);
    const SamplingGrid& grid = d.trace.grid;
    BlockOutcome out;

    for (Scheme scheme : cfg.schemes) {
      if (scheme == Scheme::ml && block >= cfg.ml_blocks) continue;

      if (scheme == Scheme::tt) {
        for (double xi_b : cfg.xi_b) {
          const SyncResult res =
              tt_synchronize(d.trace, {xi_b, cfg.tt_detection_window});
          out.sync[{scheme, xi_b}].merge(
              score_sync(res, d.timeline, grid, cfg.histogram_bin));

          std::vector<double> zone_starts;
          for (const Zone& z : res.zones) zone_starts.push_back(grid.time(z.first));
          const ZonePairing pairing = pair_tt_zones(zone_starts, d.timeline);
          const auto intervals = intervals_from_sync(res, cfg.interval, grid);
          for (DetectorKind det : cfg.detectors) {
            std::vector<std::optional<double>> stat(d.timeline.size());
            for (std::size_t k = 0; k < stat.size(); ++k) {
              if (const auto z = pairing.zone_of_symbol[k]) {
                stat[k] = detector_statistic(d.trace, intervals[*z], det);
              }
            }
            score_thresholds(cfg, scheme, xi_b, det, stat, d.timeline, out);
          }
        }
        continue;
      }

      SyncResult res;
      switch (scheme) {
        case Scheme::perfect:
          res = perfect_sync(d.timeline);
          break;
        case Scheme::ml:
          res = ml_synchronize(d.trace, cfg.interval, d.model_b, cfg.ml,
                               d.timeline.starts);
          break;
        case Scheme::po:
          res = po_synchronize(d.trace, cfg.interval,
                               {d.model_b.peak_time(), cfg.po_anchor},
                               d.timeline.starts);
          break;
        case Scheme::tt:
          break;
      }
      out.sync[{scheme, 0.0}].merge(
          score_sync(res, d.timeline, grid, cfg.histogram_bin));
      const auto intervals = intervals_from_sync(res, cfg.interval, grid);
      for (DetectorKind det : cfg.detectors) {
        std::vector<std::optional<double>> stat(d.timeline.size());
        for (std::size_t k = 0; k < stat.size(); ++k) {
          stat[k] = detector_statistic(d.trace, intervals[k], det);
        }
        score_thresholds(cfg, scheme, 0.0, det, stat, d.timeline, out);
      }
    }
    return out;
  } catch (const BlockError&) {
    throw;
  } catch (const std::exception& e) {
    throw BlockError(block, e.what());
  }
}

void SweepResult::merge(const BlockOutcome& block) {
  for (const auto& [key, stats] : block.sync) {
    auto it = sync.find(key);
    if (it == sync.end()) {
      sync.emplace(key, stats);
    } else {
      it->second.merge(stats);
    }
  }
  for (const auto& [key, stats] : block.ber) ber[key].merge(stats);
}

std::pair<BerKey, BerStats> SweepResult::best(Scheme scheme, DetectorKind detector,
                                              std::optional<double> xi_b) const {
  const std::pair<const BerKey, BerStats>* best = nullptr;
  for (const auto& cell : ber) {
    const BerKey& k = cell.first;
    if (k.scheme != scheme || k.detector != detector) continue;
    if (xi_b && k.xi_b != *xi_b) continue;
    if (best == nullptr || cell.second.ber() < best->second.ber()) best = &cell;
  }
  if (best == nullptr) throw std::out_of_range("no BER cell for the requested scheme");
  return *best;
}

const SyncErrorStats& SweepResult::sync_at_best(Scheme scheme,
                                                DetectorKind detector) const {
  const double xi_b = scheme == Scheme::tt ? best(scheme, detector).first.xi_b : 0.0;
  return sync.at({scheme, xi_b});
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.blocks = cfg.blocks;
  result.ml_blocks = cfg.runs(Scheme::ml) ? std::min(cfg.blocks, cfg.ml_blocks) : 0;

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::uint64_t b = 0; b < cfg.blocks; ++b) result.merge(run_block(cfg, b));
    return result;
  }

  // Blocks are computed in chunks and merged in block order so that the
  // per-symbol error lists do not depend on scheduling.
  const std::uint64_t chunk = 32ULL * threads;
  std::vector<BlockOutcome> outcomes;
  for (std::uint64_t begin = 0; begin < cfg.blocks; begin += chunk) {
    const std::uint64_t end = std::min(cfg.blocks, begin + chunk);
    outcomes.assign(end - begin, {});
    std::atomic<std::uint64_t> next{begin};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next++; b < end; b = next++) {
          try {
            outcomes[b - begin] = run_block(cfg, b);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    for (const auto& o : outcomes) result.merge(o);
  }
  return result;
}

std::vector<std::filesystem::path> write_sweep(const SweepResult& result,
                                               const std::filesystem::path& dir,
                                               const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  const auto ber_path = dir / (prefix + "ber.csv");
  {
    std::ofstream os(ber_path);
    os << std::setprecision(10);
    os << "scheme,detector,xi_a,xi_b,bit_errors,bits,ber,ci_low,ci_high\n";
    for (const auto& [k, s] : result.ber) {
      const auto ci = s.interval();
      os << to_string(k.scheme) << ',' << to_string(k.detector) << ',' << k.xi_a
         << ',';
      if (k.scheme == Scheme::tt) os << k.xi_b;
      os << ',' << s.errors << ',' << s.bits << ',' << s.ber() << ',' << ci.low
         << ',' << ci.high << '\n';
    }
  }
  written.push_back(ber_path);

  const auto sync_path = dir / (prefix + "sync_errors.csv");
  {
    std::ofstream os(sync_path);
    os << std::setprecision(10);
    os << "scheme,xi_b,scored,deletions,insertions,frac_abs_gt_0.5,gross_frac_0.5,mode_bin_center\n";
    for (const auto& [k, s] : result.sync) {
      os << to_string(k.scheme) << ',';
      if (k.scheme == Scheme::tt) os << k.xi_b;
      os << ',' << s.errors.size() << ',' << s.deletions << ',' << s.insertions
         << ',' << s.fraction_beyond(0.5) << ',' << s.gross_fraction(0.5) << ',';
      if (s.hist.total() > 0) os << s.hist.center(s.hist.mode());
      os << '\n';
    }
  }
  written.push_back(sync_path);

  for (const auto& [k, s] : result.sync) {
    std::string name = prefix + "hist_" + std::string(to_string(k.scheme));
    if (k.scheme == Scheme::tt) name += "_xib" + format_number(k.xi_b);
    const auto path = dir / (name + ".csv");
    std::ofstream os(path);
    os << std::setprecision(10);
    s.hist.write_csv(os);
    written.push_back(path);
  }
  return written;
}

std::string build_version() { return MOLSYNC_VERSION; }

void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& file,
                    double wall_seconds,
                    const std::vector<std::filesystem::path>& outputs) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  const nlohmann::json manifest = {
      {"config", cfg.to_json()},
      {"seed", cfg.seed},
      {"version", build_version()},
      {"wall_time_s", wall_seconds},
      {"outputs", files},
  };
  std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file);
  os << manifest.dump(2) << '\n';
}

}  // namespace molsync
