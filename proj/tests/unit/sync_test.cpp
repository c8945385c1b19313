#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "molsync/observe.hpp"
#include "molsync/sync.hpp"
#include "../support/oracles.hpp"

using namespace molsync;
using doctest::Approx;

namespace {

constexpr double kDt = 10e-6;

ObservationTrace trace_of(const std::vector<int>& b) {
  ObservationTrace t;
  t.grid = SamplingGrid{kDt, static_cast<Index>(b.size())};
  t.b = Eigen::Map<const Eigen::ArrayXi>(b.data(), static_cast<Index>(b.size()));
  t.a = Eigen::ArrayXi::Zero(t.b.size());
  return t;
}

// Counts equal to the rounded means: the noiseless limit.
ObservationTrace rounded(const ExpectedTrace& e) {
  ObservationTrace t;
  t.grid = e.grid;
  t.a = e.a.round().cast<int>();
  t.b = e.b.round().cast<int>();
  return t;
}

// A pulse so slow that every term sits below the ISI floor near t = 0.
ChannelModel flat(double noise) { return ChannelModel::gamma_pulse(1.0, 1e3, noise); }

}  // namespace

TEST_CASE("log-likelihood hand values") {
  SUBCASE("single sample") {
    const auto t = trace_of({0, 2, 0});
    const double m = ml_log_likelihood(t, 1, {}, flat(3.0), 0.0);
    CHECK(m == Approx(2.0 * std::log(3.0) - 3.0 - std::log(2.0)));
    CHECK(m == Approx(-1.496).epsilon(1e-3));
  }
  SUBCASE("empty window") {
    const auto t = trace_of(std::vector<int>(20, 0));
    CHECK(ml_log_likelihood(t, 2, {}, flat(3.0), 4 * kDt) == Approx(-5 * 3.0));
  }
  SUBCASE("two-hypothesis toy") {
    const auto m = ChannelModel::tabulated({kDt, 2 * kDt, 3 * kDt}, {5, 2, 1}, kDt, 0.1);
    const auto t = trace_of({0, 0, 0, 5, 2, 1, 0, 0});
    const double right = ml_log_likelihood(t, 2, {}, m, 3 * kDt);
    CHECK(right > ml_log_likelihood(t, 3, {}, m, 3 * kDt));
    CHECK(right > ml_log_likelihood(t, 1, {}, m, 3 * kDt));
  }
  SUBCASE("window past the trace") {
    const auto t = trace_of({1, 1, 1});
    CHECK_THROWS_AS(ml_log_likelihood(t, 2, {}, flat(1.0), 2 * kDt), std::out_of_range);
  }
}

TEST_CASE("ML noiseless limit recovers the true starts") {
  const IntervalSpec spec{0.8e-3, 1.2e-3, 5};
  const std::vector<double> starts{0, 1.2e-3, 2e-3, 3e-3, 4.2e-3};
  const std::vector<std::uint8_t> bits{1, 1, 0, 0, 1};
  const auto tl = fixed_timeline(starts, bits, spec);
  const auto b = calibrate_noise(ChannelModel::gamma_pulse(50.0, 0.1e-3), {10.0});
  const auto grid = SamplingGrid::covering(8e-3, kDt);
  const auto t = rounded(expected_counts(tl, b, b, grid));
  for (Anchor anchor : {Anchor::estimated, Anchor::genie}) {
    const auto r = ml_synchronize(t, spec, b, {0.8e-3, anchor}, starts);
    REQUIRE(r.starts.size() == starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
      CHECK(r.starts[k] == Approx(starts[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ML on the five-symbol scenario at high SNR") {
  const IntervalSpec spec{0.8e-3, 1.2e-3, 5};
  const std::vector<double> starts{0, 1.2e-3, 2e-3, 3e-3, 4.2e-3};
  const std::vector<std::uint8_t> bits{1, 1, 0, 0, 1};
  const auto tl = fixed_timeline(starts, bits, spec);
  const auto b = calibrate_noise(ChannelModel::gamma_pulse(50.0, 0.1e-3), {20.0});
  const auto grid = SamplingGrid::covering(8e-3, kDt);
  const auto e = expected_counts(tl, b, b, grid);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = ml_synchronize(sample_trace(e, seed), spec, b, {});
    bool all = true;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      all = all && std::abs(r.starts[k] - starts[k]) <= 2 * kDt + 1e-12;
    }
    good += all;
  }
  CHECK(good >= 190);
}

TEST_CASE("ML matches the exhaustive evaluator and stays in its search set") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    IntervalSpec spec{std::uniform_int_distribution<int>(3, 6)(rng) * kDt, 0.0, 4};
    spec.t_max = spec.t_min + std::uniform_int_distribution<int>(0, 3)(rng) * kDt;
    const double t_ow = std::uniform_int_distribution<int>(1, 3)(rng) * kDt;
    const auto b = calibrate_noise(
        ChannelModel::gamma_pulse(std::uniform_real_distribution<double>(1, 40)(rng),
                                  std::uniform_int_distribution<int>(1, 5)(rng) * kDt),
        {std::uniform_real_distribution<double>(-3, 15)(rng)});
    const auto tl = sample_timeline(spec, rng());
    const auto grid = SamplingGrid::covering(5 * spec.t_max, kDt);
    const auto t = sample_trace(expected_counts(tl, b, b, grid), rng());
    const std::vector<int> rb(t.b.data(), t.b.data() + t.b.size());

    const auto est = ml_synchronize(t, spec, b, {t_ow, Anchor::estimated});
    CHECK(est.starts == oracle::naive_ml(rb, b, kDt, spec, t_ow, nullptr));
    const auto gen = ml_synchronize(t, spec, b, {t_ow, Anchor::genie}, tl.starts);
    CHECK(gen.starts == oracle::naive_ml(rb, b, kDt, spec, t_ow, &tl.starts));

    for (std::size_t k = 1; k < est.starts.size(); ++k) {
      const double inc = est.starts[k] - est.starts[k - 1];
      CHECK(inc >= spec.t_min - 1e-9 * kDt);
      CHECK(inc <= spec.t_max + 1e-9 * kDt);
    }
  }
}

TEST_CASE("ML configuration") {
  const IntervalSpec spec;
  CHECK_THROWS_AS((MlConfig{1.0e-3, Anchor::estimated}.validate(spec)), std::invalid_argument);
  CHECK_NOTHROW((MlConfig{0.8e-3, Anchor::estimated}.validate(spec)));
  CHECK_THROWS_AS(MlConfig{}.validate(IntervalSpec{0.5e-3, 1.2e-3, 5}), std::invalid_argument);

  const auto b = ChannelModel::gamma_pulse(10.0, 0.1e-3, 1.0);
  const auto t = trace_of(std::vector<int>(400, 1));
  CHECK_THROWS_AS(ml_synchronize(t, IntervalSpec{0.8e-3, 1.2e-3, 3}, b,
                                 {0.8e-3, Anchor::genie}),
                  std::invalid_argument);
}

TEST_CASE("PO") {
  const IntervalSpec spec{0.8e-3, 1.2e-3, 4};
  SUBCASE("noiseless pulses") {
    const std::vector<double> starts{0, 0.9e-3, 2.1e-3, 3.0e-3};
    const std::vector<std::uint8_t> bits{1, 0, 1, 1};
    const auto tl = fixed_timeline(starts, bits, spec);
    const auto b = ChannelModel::gamma_pulse(1000.0, 0.1e-3, 1.0);
    const auto t = rounded(expected_counts(tl, b, b, SamplingGrid::covering(6e-3, kDt)));
    const auto r = po_synchronize(t, spec, {b.peak_time(), Anchor::estimated});
    for (std::size_t k = 0; k < starts.size(); ++k) {
      CHECK(r.starts[k] == Approx(starts[k]).epsilon(1e-12));
    }
  }
  SUBCASE("flat window takes the earliest sample") {
    const auto t = trace_of(std::vector<int>(800, 4));
    const auto r = po_synchronize(t, spec, {0.1e-3, Anchor::estimated});
    CHECK(r.starts[1] == Approx(0.8e-3));
    CHECK(r.starts[2] == Approx(1.6e-3));
  }
  SUBCASE("genie mode needs the truth") {
    const auto t = trace_of(std::vector<int>(800, 4));
    CHECK_THROWS_AS(po_synchronize(t, spec, {0.1e-3, Anchor::genie}), std::invalid_argument);
  }
}

TEST_CASE("TT") {
  SUBCASE("nothing crosses") {
    const auto r = tt_synchronize(trace_of({1, 2, 3, 9, 2}), {10.0, 2 * kDt});
    CHECK(r.zones.empty());
  }
  SUBCASE("four-sample toy") {
    const auto r = tt_synchronize(trace_of({0, 12, 12, 0, 0, 0}), {10.0, 2 * kDt});
    REQUIRE(r.zones.size() == 1);
    CHECK(r.zones[0].first == 1);
    CHECK(r.zones[0].last == 3);
  }
  SUBCASE("dwell window extends short zones") {
    const auto r = tt_synchronize(trace_of({0, 12, 0, 0, 0, 0, 0, 0}), {10.0, 4 * kDt});
    REQUIRE(r.zones.size() == 1);
    CHECK(r.zones[0].last == 5);
  }
  SUBCASE("last zone is clipped to the trace") {
    const auto r = tt_synchronize(trace_of({0, 0, 12, 12}), {10.0, 5 * kDt});
    REQUIRE(r.zones.size() == 1);
    CHECK(r.zones[0].last == 3);
  }
  SUBCASE("five-symbol scenario") {
    const IntervalSpec spec{0.8e-3, 1.2e-3, 5};
    const std::vector<double> starts{0, 1.2e-3, 2e-3, 3e-3, 4.2e-3};
    const std::vector<std::uint8_t> bits{1, 1, 0, 0, 1};
    const auto tl = fixed_timeline(starts, bits, spec);
    const auto b = calibrate_noise(ChannelModel::gamma_pulse(20.0, 0.1e-3), {10.0});
    const auto e = expected_counts(tl, b, b, SamplingGrid::covering(6e-3, kDt));
    const TtConfig cfg{10.0, 0.8e-3};
    int exact = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto t = sample_trace(e, seed);
      const auto r = tt_synchronize(t, cfg);
      // exact zone properties
      for (std::size_t z = 0; z < r.zones.size(); ++z) {
        CHECK(t.b[r.zones[z].first] >= 10);
        CHECK((r.zones[z].last - r.zones[z].first >= 80 ||
               r.zones[z].last == t.grid.size - 1));
        if (z > 0) CHECK(r.zones[z].first > r.zones[z - 1].last);
      }
      if (r.zones.size() != 5) continue;
      bool overlap = true;
      for (std::size_t k = 0; k < 5; ++k) {
        const double end = k + 1 < 5 ? starts[k + 1] : starts[k] + 1e-3;
        overlap = overlap && t.grid.time(r.zones[k].first) < end &&
                  t.grid.time(r.zones[k].last) >= starts[k];
      }
      exact += overlap;
    }
    CHECK(exact >= 45);
  }
}

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::perfect, Scheme::ml, Scheme::po, Scheme::tt}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("nope"), std::invalid_argument);
}
