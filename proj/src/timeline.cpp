#include "molsync/timeline.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace molsync {

namespace {

// Relative slack for increments given in rounded decimal units.
constexpr double kIncrementSlack = 1e-9;

}  // namespace

void IntervalSpec::validate() const {
  if (!(t_min > 0.0) || !(t_min <= t_max) || !std::isfinite(t_max)) {
    throw std::invalid_argument("interval bounds must satisfy 0 < t_min <= t_max");
  }
  if (symbols < 1) throw std::invalid_argument("a block needs at least one symbol");
}

Timeline sample_timeline(const IntervalSpec& spec, TimelineSeeds seeds) {
  spec.validate();
  const auto count = static_cast<std::size_t>(spec.symbols);
  Timeline out;
  out.spec = spec;
  out.starts.resize(count);
  out.symbols.resize(count);

  std::mt19937_64 timing_rng(seeds.timing);
  std::uniform_real_distribution<double> increment(spec.t_min, spec.t_max);
  double t = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (spec.t_min == spec.t_max) {
      out.starts[k] = static_cast<double>(k) * spec.t_min;
      continue;
    }
    out.starts[k] = t;
    t += increment(timing_rng);
  }

  std::mt19937_64 symbol_rng(seeds.symbols);
  std::bernoulli_distribution bit(0.5);
  for (auto& a : out.symbols) a = bit(symbol_rng) ? 1 : 0;
  return out;
}

Timeline fixed_timeline(std::span<const double> starts,
                        std::span<const std::uint8_t> symbols,
                        const IntervalSpec& spec) {
  spec.validate();
  if (starts.size() != symbols.size()) {
    throw std::invalid_argument("starts and symbols differ in length");
  }
  if (!starts.empty() && starts.front() != 0.0) {
    throw std::invalid_argument("the first symbol must start at t = 0");
  }
  const double slack = kIncrementSlack * spec.t_max;
  for (std::size_t k = 1; k < starts.size(); ++k) {
    const double inc = starts[k] - starts[k - 1];
    if (!(inc > 0.0)) throw std::invalid_argument("starts must be strictly increasing");
    if (inc < spec.t_min - slack || inc > spec.t_max + slack) {
      throw std::invalid_argument("symbol interval outside [t_min, t_max]");
    }
  }
  for (auto a : symbols) {
    if (a > 1) throw std::invalid_argument("symbols must be 0 or 1");
  }
  Timeline out;
  out.starts.assign(starts.begin(), starts.end());
  out.symbols.assign(symbols.begin(), symbols.end());
  out.spec = spec;
  out.spec.symbols = static_cast<int>(starts.size());
  return out;
}

}  // namespace molsync
