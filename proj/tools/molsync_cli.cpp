// Command-line front end: simulate, sweep, figure, validate.
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "molsync/config.hpp"
#include "molsync/experiment.hpp"
#include "molsync/figures.hpp"

namespace {

using namespace molsync;
namespace fs = std::filesystem;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> blocks;
  std::optional<std::uint64_t> ml_blocks;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--blocks", args.blocks, "number of blocks");
  cmd->add_option("--ml-blocks", args.ml_blocks, "blocks evaluated with ML synchronization");
  cmd->add_option("--seed", args.seed, "base seed (also timing and symbol seeds)");
  cmd->add_option("--threads", args.threads, "worker threads (0: all cores)");
  cmd->add_option("--out", args.out, "output directory");
}

ExperimentConfig load_config(const RunArgs& args) {
  ExperimentConfig cfg = ExperimentConfig::load(args.config);
  if (args.blocks) cfg.blocks = *args.blocks;
  if (args.ml_blocks) cfg.ml_blocks = *args.ml_blocks;
  if (args.seed) cfg.seed = cfg.timing_seed = cfg.symbol_seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;
  if (args.out) cfg.output_dir = *args.out;
  cfg.validate();
  return cfg;
}

void print_summary(const ExperimentConfig& cfg, const SweepResult& r, std::ostream& os) {
  os << std::setprecision(4);
  for (const auto& [key, stats] : r.sync) {
    os << std::left << std::setw(8) << to_string(key.scheme);
    if (key.scheme == Scheme::tt) os << " xi_B=" << key.xi_b;
    os << "  symbols=" << stats.errors.size() << "  |e|>0.5: " << stats.fraction_beyond(0.5)
       << "  deletions=" << stats.deletions << "  insertions=" << stats.insertions;
    if (key.scheme == Scheme::tt) os << "  unmatched=" << stats.unmatched;
    os << '\n';
  }
  for (Scheme s : cfg.schemes) {
    for (DetectorKind d : cfg.detectors) {
      const auto [key, stats] = r.best(s, d);
      os << "best BER " << to_string(s) << '/' << to_string(d) << ": " << stats.ber()
         << " at xi_A=" << key.xi_a;
      if (s == Scheme::tt) os << " xi_B=" << key.xi_b;
      os << '\n';
    }
  }
}

std::vector<fs::path> run_and_write(const ExperimentConfig& cfg, const std::string& prefix,
                                    bool quiet) {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult r = run_sweep(cfg);
  auto files = write_sweep(r, cfg.output_dir, prefix);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto manifest = cfg.output_dir / (prefix + "manifest.json");
  write_manifest(cfg, manifest, wall, files);
  files.push_back(manifest);
  if (!quiet) print_summary(cfg, r, std::cout);
  return files;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol synchronization simulator for diffusive molecular links"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress the summary");

  RunArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "run one experiment config");
  add_run_options(simulate, sim_args);

  RunArgs sweep_args;
  std::string durations;
  auto* sweep = app.add_subcommand("sweep", "run a config, optionally over mean symbol durations");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--symbol-durations", durations,
                    "comma-separated mean symbol durations in ms (t_max/t_min kept)");

  std::string figure_name;
  std::string figure_out = "figures";
  FigureOptions fig_opts;
  std::optional<std::uint64_t> fig_blocks;
  std::optional<std::uint64_t> fig_ml_blocks;
  auto* figure = app.add_subcommand("figure", "regenerate the data behind one figure");
  figure->add_option("name", figure_name, "fig3|fig4|fig5|fig6a|fig6b|fig6c|fig7|fig8|fig9")
      ->required();
  figure->add_option("--out", figure_out, "output directory");
  figure->add_option("--blocks", fig_blocks, "override block count");
  figure->add_option("--ml-blocks", fig_ml_blocks, "override ML block count");
  figure->add_option("--seed", fig_opts.seed, "base seed");
  figure->add_option("--threads", fig_opts.threads, "worker threads (0: all cores)");
  std::string figure_config_path;
  figure->add_option("--config", figure_config_path, "take the channel block from this config")
      ->check(CLI::ExistingFile);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("--config", validate_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      run_and_write(load_config(sim_args), "", quiet);
    } else if (*sweep) {
      const ExperimentConfig cfg = load_config(sweep_args);
      if (durations.empty()) {
        run_and_write(cfg, "", quiet);
      } else {
        for (double ms : parse_list(durations)) {
          std::ostringstream prefix;
          prefix << "T" << ms << "_";
          if (!quiet) std::cout << "mean symbol duration " << ms << " ms\n";
          run_and_write(cfg.with_mean_interval(ms * 1e-3), prefix.str(), quiet);
        }
      }
    } else if (*figure) {
      fig_opts.blocks = fig_blocks;
      fig_opts.ml_blocks = fig_ml_blocks;
      if (!figure_config_path.empty()) {
        fig_opts.channel = ExperimentConfig::load(figure_config_path).channel;
      }
      for (const auto& f : reproduce_figure(figure_name, figure_out, fig_opts)) {
        if (!quiet) std::cout << f.string() << '\n';
      }
    } else if (*validate) {
      ExperimentConfig::load(validate_path).validate();
      std::cout << "ok\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
