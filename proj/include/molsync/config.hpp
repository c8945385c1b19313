#ifndef MOLSYNC_CONFIG_HPP
#define MOLSYNC_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "molsync/channel.hpp"
#include "molsync/detect.hpp"
#include "molsync/sync.hpp"
#include "molsync/timeline.hpp"

namespace molsync {

/// Channel block of an experiment. Both molecule types share the geometry.
struct ChannelConfig {
  std::string model = "gamma";  // "gamma" | "hitting-rate" | "table"
  ChannelParams params;
  double released_b = 1e3;  // N_B; params.released_count holds N_A
  double receptors_b = 1e3;
  double bound_fraction = 0.1;
  double peak_value_a = 8.0;      // gamma model
  double peak_value_b = 8.0;
  double peak_time = 0.2e-3;
  std::vector<double> table_times;  // table model, seconds
  std::vector<double> table_a;
  std::vector<double> table_b;
  double snr_db_a = 10.0;
  double snr_db_b = 10.0;

  /// Calibrated (type A, type B) models.
  std::pair<ChannelModel, ChannelModel> build(double dt) const;
};

struct ExperimentConfig {
  ChannelConfig channel;
  IntervalSpec interval;
  double dt = 10e-6;
  std::vector<Scheme> schemes{Scheme::perfect, Scheme::ml, Scheme::po, Scheme::tt};
  MlConfig ml;
  Anchor po_anchor = Anchor::estimated;
  double tt_detection_window = 0.8e-3;
  std::vector<double> xi_b{9.0};
  std::vector<DetectorKind> detectors{DetectorKind::mean, DetectorKind::peak};
  std::map<DetectorKind, std::vector<double>> xi_a{
      {DetectorKind::mean, {2.5}}, {DetectorKind::peak, {10.5}}};
  std::uint64_t blocks = 1000;
  std::uint64_t ml_blocks = 100;
  std::uint64_t seed = 1;
  std::uint64_t timing_seed = 1;
  std::uint64_t symbol_seed = 1;
  double histogram_bin = 0.05;
  unsigned threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir = "out";

  /// Checks every per-scheme constraint; throws std::invalid_argument.
  void validate() const;
  bool runs(Scheme s) const;

  /// Table II defaults with T_ow = T_dw = t_min.
  static ExperimentConfig defaults();
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& file);
  nlohmann::json to_json() const;

  /// Same symbol-duration ratio, mean interval `mean`; T_ow and T_dw follow
  /// t_min.
  ExperimentConfig with_mean_interval(double mean) const;
};

}  // namespace molsync

#endif  // MOLSYNC_CONFIG_HPP
