#include "molsync/figures.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "molsync/experiment.hpp"
#include "molsync/observe.hpp"
#include "molsync/sync.hpp"

namespace molsync {

namespace {

namespace fs = std::filesystem;
constexpr double kMs = 1e-3;

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::llround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
  return out;
}

std::ofstream open_csv(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(10);
  return os;
}

// Five-symbol scenario with irregular release instants.
struct Scenario {
  Timeline timeline;
  ChannelModel model_a;
  ChannelModel model_b;
  ExpectedTrace expected;
  ObservationTrace trace;
};

ExperimentConfig scenario_config(const FigureOptions& opts) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  if (opts.channel) cfg.channel = *opts.channel;
  return cfg;
}

Scenario make_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::vector<double> starts{0.0, 1.2 * kMs, 2.0 * kMs, 3.0 * kMs, 4.2 * kMs};
  const std::vector<std::uint8_t> bits{1, 1, 0, 0, 1};
  Timeline tl = fixed_timeline(starts, bits, cfg.interval);
  auto [a, b] = cfg.channel.build(cfg.dt);
  const SamplingGrid grid = grid_for(tl, cfg.dt);
  ExpectedTrace expected = expected_counts(tl, a, b, grid);
  ObservationTrace trace = sample_trace(expected, seed);
  return {std::move(tl), std::move(a), std::move(b), std::move(expected), std::move(trace)};
}

fs::path write_scenario_trace(const Scenario& s, const fs::path& file) {
  auto os = open_csv(file);
  write_trace_csv(os, s.expected, s.trace);
  return file;
}

std::vector<fs::path> fig3(const fs::path& out, const FigureOptions& opts) {
  const ExperimentConfig cfg = scenario_config(opts);
  const Scenario s = make_scenario(cfg, opts.seed);
  std::vector<fs::path> files{write_scenario_trace(s, out / "fig3_trace.csv")};

  const SyncResult res = ml_synchronize(s.trace, s.timeline.spec, s.model_b, cfg.ml);
  const SamplingGrid& grid = s.trace.grid;
  {
    const auto path = out / "fig3_ml_metric.csv";
    auto os = open_csv(path);
    os << "k,t_ms,log_likelihood\n";
    for (std::size_t k = 1; k < res.starts.size(); ++k) {
      const std::span<const double> prev(res.starts.data(), k);
      const Index lo = grid.first_at_or_after(res.starts[k - 1] + cfg.interval.t_min);
      const Index hi = grid.last_at_or_before(res.starts[k - 1] + cfg.interval.t_max);
      for (Index h = lo; h <= hi; ++h) {
        os << k + 1 << ',' << grid.time(h) / kMs << ','
           << ml_log_likelihood(s.trace, h, prev, s.model_b, cfg.ml.observation_window)
           << '\n';
      }
    }
    files.push_back(path);
  }
  {
    const auto path = out / "fig3_estimates.csv";
    auto os = open_csv(path);
    os << "k,true_ms,estimate_ms\n";
    for (std::size_t k = 0; k < res.starts.size(); ++k) {
      os << k + 1 << ',' << s.timeline.starts[k] / kMs << ',' << res.starts[k] / kMs << '\n';
    }
    files.push_back(path);
  }
  return files;
}

std::vector<fs::path> fig4(const fs::path& out, const FigureOptions& opts) {
  const ExperimentConfig cfg = scenario_config(opts);
  const Scenario s = make_scenario(cfg, opts.seed);
  std::vector<fs::path> files{write_scenario_trace(s, out / "fig4_trace.csv")};
  const double t_p = s.model_b.peak_time();
  const SyncResult res = po_synchronize(s.trace, s.timeline.spec, {t_p, Anchor::estimated});
  const auto path = out / "fig4_estimates.csv";
  auto os = open_csv(path);
  os << "k,true_ms,estimate_ms,window_start_ms,window_end_ms\n";
  for (std::size_t k = 0; k < res.starts.size(); ++k) {
    os << k + 1 << ',' << s.timeline.starts[k] / kMs << ',' << res.starts[k] / kMs << ',';
    if (k > 0) {
      os << (res.starts[k - 1] + cfg.interval.t_min + t_p) / kMs << ','
         << (res.starts[k - 1] + cfg.interval.t_max + t_p) / kMs;
    } else {
      os << ',';
    }
    os << '\n';
  }
  files.push_back(path);
  return files;
}

std::vector<fs::path> fig5(const fs::path& out, const FigureOptions& opts) {
  const ExperimentConfig cfg = scenario_config(opts);
  const Scenario s = make_scenario(cfg, opts.seed);
  std::vector<fs::path> files{write_scenario_trace(s, out / "fig5_trace.csv")};
  const SyncResult res = tt_synchronize(s.trace, {10.0, 0.8 * kMs});
  const auto path = out / "fig5_zones.csv";
  auto os = open_csv(path);
  os << "zone,start_ms,end_ms\n";
  for (std::size_t z = 0; z < res.zones.size(); ++z) {
    os << z + 1 << ',' << s.trace.grid.time(res.zones[z].first) / kMs << ','
       << s.trace.grid.time(res.zones[z].last) / kMs << '\n';
  }
  files.push_back(path);
  return files;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Lowest BER per scheme and detector over every swept threshold.
fs::path write_best(const SweepResult& r, const ExperimentConfig& cfg,
                    const fs::path& file, bool append, const std::string& label) {
  std::ofstream os;
  if (append) {
    os.open(file, std::ios::app);
  } else {
    os = open_csv(file);
    os << "case,scheme,detector,xi_a,xi_b,bit_errors,bits,ber\n";
  }
  os << std::setprecision(10);
  for (Scheme scheme : cfg.schemes) {
    for (DetectorKind det : cfg.detectors) {
      const auto [key, stats] = r.best(scheme, det);
      os << label << ',' << to_string(scheme) << ',' << to_string(det) << ','
         << key.xi_a << ',';
      if (scheme == Scheme::tt) os << key.xi_b;
      os << ',' << stats.errors << ',' << stats.bits << ',' << stats.ber() << '\n';
    }
  }
  return file;
}

std::vector<fs::path> monte_carlo_figure(std::string_view name, const fs::path& out,
                                         const FigureOptions& opts) {
  const std::string prefix = std::string(name) + "_";
  const ExperimentConfig cfg = figure_config(name, opts);
  if (name != "fig9") {
    const SweepResult r = run_sweep(cfg);
    auto files = write_sweep(r, out, prefix);
    if (name == "fig7" || name == "fig8") {
      files.push_back(write_best(r, cfg, out / (prefix + "best.csv"), false, "1"));
    }
    return files;
  }
  std::vector<fs::path> files;
  const fs::path best = out / "fig9_best.csv";
  bool append = false;
  for (double mean_ms : {0.5, 1.0, 2.0}) {
    const ExperimentConfig c = cfg.with_mean_interval(mean_ms * kMs);
    const SweepResult r = run_sweep(c);
    auto written = write_sweep(r, out, prefix + "T" + tag(mean_ms) + "_");
    files.insert(files.end(), written.begin(), written.end());
    write_best(r, c, best, append, tag(mean_ms));
    append = true;
  }
  files.push_back(best);
  return files;
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig3",  "fig4",  "fig5", "fig6a", "fig6b",
                                              "fig6c", "fig7", "fig8", "fig9"};
  return names;
}

ExperimentConfig figure_config(std::string_view name, const FigureOptions& opts) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  if (opts.channel) cfg.channel = *opts.channel;
  cfg.seed = cfg.timing_seed = cfg.symbol_seed = opts.seed;
  cfg.threads = opts.threads;

  if (name == "fig6a" || name == "fig6b" || name == "fig6c") {
    cfg.schemes = {Scheme::ml, Scheme::po, Scheme::tt};
    cfg.detectors = {DetectorKind::mean};
    cfg.xi_a = {{DetectorKind::mean, arange(1.0, 10.0, 0.25)}};
    if (name == "fig6b") {
      cfg.channel.snr_db_b = 5.0;
    } else if (name == "fig6c") {
      cfg = cfg.with_mean_interval(0.5 * kMs);
    }
    cfg.xi_b = arange(1.0, 25.0, 1.0);
  } else if (name == "fig7") {
    cfg.schemes = {Scheme::tt};
    cfg.xi_b = arange(1.0, 25.0, 1.0);
    cfg.xi_a = {{DetectorKind::mean, arange(1.0, 10.0, 0.25)},
                {DetectorKind::peak, arange(1.0, 30.0, 0.5)}};
  } else if (name == "fig8") {
    cfg.xi_b = arange(1.0, 25.0, 1.0);
    cfg.xi_a = {{DetectorKind::mean, arange(1.0, 10.0, 0.25)},
                {DetectorKind::peak, arange(1.0, 30.0, 0.5)}};
  } else if (name == "fig9") {
    cfg.detectors = {DetectorKind::peak};
    cfg.xi_b = arange(1.0, 25.0, 1.0);
    cfg.xi_a = {{DetectorKind::peak, arange(1.0, 30.0, 0.5)}};
  } else {
    throw std::invalid_argument("no Monte Carlo preset for figure " + std::string(name));
  }
  if (opts.blocks) cfg.blocks = *opts.blocks;
  if (opts.ml_blocks) cfg.ml_blocks = *opts.ml_blocks;
  return cfg;
}

std::vector<fs::path> reproduce_figure(std::string_view name, const fs::path& out,
                                       const FigureOptions& opts) {
  if (name == "fig3") return fig3(out, opts);
  if (name == "fig4") return fig4(out, opts);
  if (name == "fig5") return fig5(out, opts);
  for (const auto& n : figure_names()) {
    if (n == name) return monte_carlo_figure(name, out, opts);
  }
  throw std::invalid_argument("unknown figure: " + std::string(name));
}

}  // namespace molsync
