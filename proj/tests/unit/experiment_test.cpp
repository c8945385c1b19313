#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "molsync/experiment.hpp"
#include "molsync/figures.hpp"

using namespace molsync;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small() {
  auto cfg = ExperimentConfig::defaults();
  cfg.blocks = 6;
  cfg.ml_blocks = 3;
  cfg.xi_b = {10.0, 13.0};
  cfg.xi_a = {{DetectorKind::mean, {3.0, 4.5}}, {DetectorKind::peak, {10.0, 13.0}}};
  return cfg;
}

}  // namespace

TEST_CASE("one block scores K bits per cell") {
  auto cfg = ExperimentConfig::defaults();
  cfg.schemes = {Scheme::perfect};
  cfg.detectors = {DetectorKind::mean};
  const auto out = run_block(cfg, 0);
  REQUIRE(out.ber.size() == 1);
  CHECK(out.ber.begin()->second.bits == 50);
  CHECK(out.sync.at({Scheme::perfect, 0.0}).errors.size() == 49);
}

TEST_CASE("blocks are deterministic and independent of threading") {
  const auto cfg = small();
  const auto a = run_block(cfg, 2);
  const auto b = run_block(cfg, 2);
  CHECK(a.sync.at({Scheme::ml, 0.0}).errors == b.sync.at({Scheme::ml, 0.0}).errors);

  auto one = cfg;
  one.threads = 1;
  auto three = cfg;
  three.threads = 3;
  const auto r1 = run_sweep(one);
  const auto r3 = run_sweep(three);
  REQUIRE(r1.ber.size() == r3.ber.size());
  for (const auto& [k, s] : r1.ber) {
    CHECK(r3.ber.at(k).errors == s.errors);
    CHECK(r3.ber.at(k).bits == s.bits);
  }
  for (const auto& [k, s] : r1.sync) CHECK(r3.sync.at(k).errors == s.errors);
  CHECK(r1.ber.at({Scheme::ml, DetectorKind::mean, 3.0, 0.0}).bits == 3 * 50);
  CHECK(r1.ber.at({Scheme::po, DetectorKind::mean, 3.0, 0.0}).bits == 6 * 50);
}

TEST_CASE("sweep cells share one observation per block") {
  auto cfg = small();
  cfg.schemes = {Scheme::perfect};
  const auto d1 = simulate_block(cfg, 4);
  cfg.xi_a = {{DetectorKind::mean, {1.0}}, {DetectorKind::peak, {2.0}}};
  const auto d2 = simulate_block(cfg, 4);
  CHECK((d1.trace.b == d2.trace.b).all());
  CHECK(d1.timeline.starts == d2.timeline.starts);
  CHECK_FALSE((simulate_block(cfg, 5).trace.b.head(100) == d1.trace.b.head(100)).all());
}

TEST_CASE("ML with t_max > 2 t_min is rejected before running") {
  auto cfg = ExperimentConfig::defaults();
  cfg.interval = {0.5e-3, 1.2e-3, 50};
  cfg.ml.observation_window = 0.5e-3;
  cfg.tt_detection_window = 0.5e-3;
  CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  cfg.schemes = {Scheme::po};
  cfg.blocks = 1;
  CHECK_NOTHROW(run_sweep(cfg));
}

TEST_CASE("the grid covers drifted estimates") {
  const auto tl = sample_timeline(IntervalSpec{}, 3);
  const auto g = grid_for(tl, 10e-6);
  CHECK(g.horizon() >= 49 * 1.2e-3 + 3 * 1.2e-3 - 1e-12);
}

TEST_CASE("written outputs") {
  const fs::path dir = fs::temp_directory_path() / "molsync_experiment_test";
  fs::remove_all(dir);
  const auto cfg = small();
  const auto files = write_sweep(run_sweep(cfg), dir, "x_");
  CHECK(fs::exists(dir / "x_ber.csv"));
  CHECK(fs::exists(dir / "x_sync_errors.csv"));
  CHECK(fs::exists(dir / "x_hist_tt_xib13.csv"));
  CHECK(slurp(dir / "x_ber.csv").rfind("scheme,detector,xi_a,xi_b,bit_errors,bits,ber,ci_low,ci_high\n", 0) == 0);
  write_manifest(cfg, dir / "manifest.json", 1.5, files);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("seed") == 1);
  CHECK(m.contains("version"));
  CHECK(m.at("outputs").size() == files.size());
  fs::remove_all(dir);
}

TEST_CASE("figure recipes") {
  const fs::path dir = fs::temp_directory_path() / "molsync_figure_test";
  fs::remove_all(dir);
  FigureOptions opts;
  opts.blocks = 3;
  opts.ml_blocks = 2;
  for (const char* name : {"fig3", "fig4", "fig5"}) {
    const auto files = reproduce_figure(name, dir / "a", opts);
    const auto again = reproduce_figure(name, dir / "b", opts);
    REQUIRE(files.size() == again.size());
    for (std::size_t i = 0; i < files.size(); ++i) CHECK(slurp(files[i]) == slurp(again[i]));
  }
  CHECK(fs::exists(dir / "a" / "fig3_ml_metric.csv"));
  CHECK(fs::exists(dir / "a" / "fig5_zones.csv"));
  CHECK(figure_config("fig6b").channel.snr_db_b == 5.0);
  CHECK(figure_config("fig6c").interval.t_min == doctest::Approx(0.4e-3));
  CHECK_THROWS_AS(reproduce_figure("fig42", dir, opts), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("ML timing error does not shrink as SNR_B drops") {
  auto median_abs = [](double snr) {
    auto cfg = ExperimentConfig::defaults();
    cfg.channel.snr_db_b = snr;
    cfg.schemes = {Scheme::ml};
    cfg.detectors = {DetectorKind::mean};
    cfg.blocks = cfg.ml_blocks = 20;
    const auto r = run_sweep(cfg);
    std::vector<double> e = r.sync.at({Scheme::ml, 0.0}).errors;
    for (auto& x : e) x = std::abs(x);
    std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
    return e[e.size() / 2];
  };
  const double hi = median_abs(30.0), mid = median_abs(10.0), lo = median_abs(5.0);
  CHECK(hi <= mid);
  CHECK(mid <= lo);
  CHECK(lo < 0.5);
}

TEST_CASE("perfect sync with the mean detector is nearly error-free at high SNR_A") {
  auto cfg = ExperimentConfig::defaults();
  cfg.channel.snr_db_a = 30.0;
  cfg.schemes = {Scheme::perfect};
  cfg.detectors = {DetectorKind::mean};
  cfg.xi_a = {{DetectorKind::mean, {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0}}};
  cfg.blocks = 100;
  const auto r = run_sweep(cfg);
  CHECK(r.best(Scheme::perfect, DetectorKind::mean).second.ber() < 1e-3);
}
