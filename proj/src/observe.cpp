#include "molsync/observe.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace molsync {

namespace {
constexpr double kGridSlack = 1e-9;
}

SamplingGrid SamplingGrid::covering(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) {
    throw std::invalid_argument("grid needs dt > 0 and a non-negative horizon");
  }
  SamplingGrid g;
  g.dt = dt;
  g.size = static_cast<Index>(std::ceil(horizon / dt - kGridSlack)) + 1;
  return g;
}

Index SamplingGrid::first_at_or_after(double t) const {
  return static_cast<Index>(std::ceil(t / dt - kGridSlack));
}

Index SamplingGrid::last_at_or_before(double t) const {
  return static_cast<Index>(std::floor(t / dt + kGridSlack));
}

Index SamplingGrid::steps(double duration) const {
  return static_cast<Index>(std::llround(duration / dt));
}

void accumulate_pulse(Eigen::Ref<Eigen::ArrayXd> out, Index first,
                      const SamplingGrid& grid, const ChannelModel& model,
                      double start) {
  const double floor_level = kIsiFraction * model.peak_value();
  const Index begin = std::max(first, grid.first_at_or_after(start));
  for (Index n = begin; n < first + out.size(); ++n) {
    const double tau = grid.time(n) - start;
    if (tau < 0.0) continue;
    const double p = model(tau);
    if (p > floor_level) {
      out[n - first] += p;
    } else if (tau > model.peak_time()) {
      break;
    }
  }
}

ExpectedTrace expected_counts(const Timeline& timeline,
                              const ChannelModel& model_a,
                              const ChannelModel& model_b,
                              const SamplingGrid& grid) {
  ExpectedTrace out;
  out.grid = grid;
  out.a = Eigen::ArrayXd::Zero(grid.size);
  out.b = Eigen::ArrayXd::Zero(grid.size);
  for (std::size_t k = 0; k < timeline.size(); ++k) {
    const double s = timeline.starts[k];
    accumulate_pulse(out.b, 0, grid, model_b, s);
    if (timeline.symbols[k] != 0) accumulate_pulse(out.a, 0, grid, model_a, s);
  }
  out.a += model_a.noise();
  out.b += model_b.noise();
  return out;
}

ObservationTrace sample_trace(const ExpectedTrace& expected,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const Eigen::ArrayXd& mean) {
    Eigen::ArrayXi counts(mean.size());
    for (Index n = 0; n < mean.size(); ++n) {
      if (mean[n] > 0.0) {
        std::poisson_distribution<int> poisson(mean[n]);
        counts[n] = poisson(rng);
      } else {
        counts[n] = 0;
      }
    }
    return counts;
  };
  ObservationTrace out;
  out.grid = expected.grid;
  out.a = draw(expected.a);
  out.b = draw(expected.b);
  return out;
}

void write_trace_csv(std::ostream& os, const ExpectedTrace& expected,
                     const ObservationTrace& observed) {
  os << "t_n,rbar_A,rbar_B,r_A,r_B\n";
  for (Index n = 0; n < expected.grid.size; ++n) {
    os << expected.grid.time(n) << ',' << expected.a[n] << ',' << expected.b[n]
       << ',' << observed.a[n] << ',' << observed.b[n] << '\n';
  }
}

}  // namespace molsync
