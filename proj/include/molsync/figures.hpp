#ifndef MOLSYNC_FIGURES_HPP
#define MOLSYNC_FIGURES_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molsync/config.hpp"

namespace molsync {

struct FigureOptions {
  std::optional<std::uint64_t> blocks;
  std::optional<std::uint64_t> ml_blocks;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Replaces the default channel block (SNR overrides of a preset still
  /// apply on top).
  std::optional<ChannelConfig> channel;
};

/// fig3 .. fig9 (fig6a, fig6b, fig6c for the three histogram panels).
const std::vector<std::string>& figure_names();

/// Monte Carlo preset behind a histogram or BER figure. For fig9 this is the
/// 1 ms configuration; the recipe derives the other durations from it.
ExperimentConfig figure_config(std::string_view name, const FigureOptions& opts = {});

/// Writes the CSVs of one figure into `out` and returns their paths.
/// Throws std::invalid_argument for an unknown name.
std::vector<std::filesystem::path> reproduce_figure(std::string_view name,
                                                    const std::filesystem::path& out,
                                                    const FigureOptions& opts = {});

}  // namespace molsync

#endif  // MOLSYNC_FIGURES_HPP
