#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "molsync/config.hpp"

using namespace molsync;
using doctest::Approx;
using nlohmann::json;

TEST_CASE("defaults validate and round-trip") {
  const auto cfg = ExperimentConfig::defaults();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.interval.t_min == Approx(0.8e-3));
  CHECK(cfg.interval.t_max == Approx(1.2e-3));
  CHECK(cfg.interval.symbols == 50);
  CHECK(cfg.dt == Approx(10e-6));
  CHECK(cfg.ml.observation_window == Approx(cfg.interval.t_min));

  const auto back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
}

TEST_CASE("json fields") {
  const json j = json::parse(R"({
    "channel": {"model": "gamma", "snr_db_b": 5, "gamma": {"peak_value_a": 9, "peak_value_b": 11, "peak_time_ms": 0.2}},
    "timing": {"t_min_ms": 0.4, "t_max_ms": 0.6, "K": 20},
    "scheme": ["ml", "tt"],
    "tt": {"xi_b": [10, 11]},
    "detector": {"kind": "peak", "xi_a": [12, 13]},
    "run": {"blocks": 7, "seed": 42}
  })");
  const auto cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.channel.snr_db_b == 5.0);
  CHECK(cfg.channel.peak_value_b == 11.0);
  CHECK(cfg.channel.peak_time == Approx(0.2e-3));
  CHECK(cfg.interval.symbols == 20);
  CHECK(cfg.ml.observation_window == Approx(0.4e-3));
  CHECK(cfg.tt_detection_window == Approx(0.4e-3));
  CHECK(cfg.schemes.size() == 2);
  CHECK(cfg.xi_b == std::vector<double>{10, 11});
  CHECK(cfg.xi_a.at(DetectorKind::peak) == std::vector<double>{12, 13});
  CHECK(cfg.blocks == 7);
  CHECK(cfg.timing_seed == 42);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"timming": {}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"run": {"blocks": 0}})")),
                  std::invalid_argument);
  // ML needs t_max <= 2 t_min
  CHECK_THROWS_AS(ExperimentConfig::from_json(
                      json::parse(R"({"timing": {"t_min_ms": 0.5, "t_max_ms": 1.2}})")),
                  std::invalid_argument);
  CHECK_NOTHROW(ExperimentConfig::from_json(json::parse(
      R"({"timing": {"t_min_ms": 0.5, "t_max_ms": 1.2}, "scheme": ["po", "tt"], "ml": {"t_ow_ms": 0.5}})")));
  CHECK_THROWS_AS(
      ExperimentConfig::from_json(json::parse(R"({"ml": {"t_ow_ms": 1.0}})")),
      std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"channel": {"model": "magic"}})")),
                  std::invalid_argument);
}

TEST_CASE("loading from disk") {
  const auto path = std::filesystem::temp_directory_path() / "molsync_config_test.json";
  {
    std::ofstream os(path);
    os << "{\n  // comments are allowed\n  \"run\": {\"blocks\": 3}\n}\n";
  }
  CHECK(ExperimentConfig::load(path).blocks == 3);
  std::filesystem::remove(path);
  CHECK_THROWS(ExperimentConfig::load(path));
}

TEST_CASE("changing the mean interval keeps the ratio") {
  const auto c = ExperimentConfig::defaults().with_mean_interval(2e-3);
  CHECK(c.interval.t_min == Approx(1.6e-3));
  CHECK(c.interval.t_max == Approx(2.4e-3));
  CHECK(c.ml.observation_window == Approx(1.6e-3));
  CHECK(c.tt_detection_window == Approx(1.6e-3));
}

TEST_CASE("channel build calibrates both types") {
  ChannelConfig ch;
  ch.snr_db_a = 10.0;
  ch.snr_db_b = 5.0;
  const auto [a, b] = ch.build(10e-6);
  CHECK(a.noise() == Approx(a.peak_value() / 10.0));
  CHECK(b.noise() == Approx(b.peak_value() / 3.16227766));

  ChannelConfig hr;
  hr.model = "hitting-rate";
  const auto [ha, hb] = hr.build(10e-6);
  CHECK(ha.peak_time() == Approx(33.333e-6).epsilon(1e-4));
  CHECK(ha.peak_value() == Approx(50.0));
}
