#include "molsync/sync.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace molsync {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(r!) for small counts, cached per call site.
class LogFactorial {
 public:
  double operator()(int r) {
    if (r >= static_cast<int>(table_.size())) {
      const auto old = table_.size();
      table_.resize(static_cast<std::size_t>(r) + 1);
      for (auto i = old; i < table_.size(); ++i) {
        table_[i] = std::lgamma(static_cast<double>(i) + 1.0);
      }
    }
    return table_[static_cast<std::size_t>(r)];
  }

 private:
  std::vector<double> table_;
};

double poisson_log_pmf(int r, double mean, LogFactorial& log_fact) {
  if (mean == 0.0) return r == 0 ? 0.0 : kNegInf;
  return r * std::log(mean) - mean - log_fact(r);
}

Index window_samples(const SamplingGrid& grid, double observation_window) {
  return grid.steps(observation_window) + 1;
}

// Log-likelihood over [h, h + window) given the pulse sum of earlier
// releases (`base`, indexed from `base_first`).
double window_metric(const ObservationTrace& trace, Index h, Index window,
                     const Eigen::ArrayXd& base, Index base_first,
                     const ChannelModel& model, LogFactorial& log_fact) {
  const SamplingGrid& grid = trace.grid;
  const double floor_level = kIsiFraction * model.peak_value();
  const double start = grid.time(h);
  double metric = 0.0;
  for (Index n = h; n < h + window; ++n) {
    double acc = base[n - base_first];
    const double p = model(grid.time(n) - start);
    if (p > floor_level) acc += p;
    const double mean = acc + model.noise();
    metric += poisson_log_pmf(trace.b[n], mean, log_fact);
  }
  return metric;
}

double anchor_for(std::size_t k, Anchor mode, std::span<const double> estimates,
                  std::span<const double> true_starts) {
  return mode == Anchor::genie ? true_starts[k - 1] : estimates[k - 1];
}

void require_truth(Anchor mode, std::span<const double> true_starts,
                   const IntervalSpec& spec) {
  if (mode == Anchor::genie &&
      true_starts.size() < static_cast<std::size_t>(spec.symbols)) {
    throw std::invalid_argument("genie anchoring needs the true starts");
  }
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::perfect: return "perfect";
    case Scheme::ml: return "ml";
    case Scheme::po: return "po";
    case Scheme::tt: return "tt";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "perfect") return Scheme::perfect;
  if (name == "ml") return Scheme::ml;
  if (name == "po") return Scheme::po;
  if (name == "tt") return Scheme::tt;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

void MlConfig::validate(const IntervalSpec& spec) const {
  if (!(observation_window > 0.0)) {
    throw std::invalid_argument("ML observation window must be positive");
  }
  if (observation_window > spec.t_min) {
    throw std::invalid_argument("ML observation window exceeds t_min");
  }
  if (!spec.ml_compatible()) {
    throw std::invalid_argument("ML synchronization requires t_max <= 2 t_min");
  }
}

void PoConfig::validate() const {
  if (!(peak_time > 0.0)) throw std::invalid_argument("peak time must be positive");
}

void TtConfig::validate(const IntervalSpec& spec) const {
  if (!(threshold > 0.0)) throw std::invalid_argument("trigger threshold must be positive");
  if (!(detection_window > 0.0) || detection_window > spec.t_min) {
    throw std::invalid_argument("detection window must lie in (0, t_min]");
  }
}

double ml_log_likelihood(const ObservationTrace& trace, Index hypothesis,
                         std::span<const double> prev_starts,
                         const ChannelModel& model_b,
                         double observation_window) {
  const Index window = window_samples(trace.grid, observation_window);
  if (hypothesis < 0 || hypothesis + window > trace.grid.size) {
    throw std::out_of_range("ML window leaves the trace");
  }
  Eigen::ArrayXd base = Eigen::ArrayXd::Zero(window);
  for (double s : prev_starts) {
    accumulate_pulse(base, hypothesis, trace.grid, model_b, s);
  }
  LogFactorial log_fact;
  return window_metric(trace, hypothesis, window, base, hypothesis, model_b,
                       log_fact);
}

SyncResult ml_synchronize(const ObservationTrace& trace,
                          const IntervalSpec& spec,
                          const ChannelModel& model_b, const MlConfig& cfg,
                          std::span<const double> true_starts) {
  spec.validate();
  cfg.validate(spec);
  require_truth(cfg.anchor, true_starts, spec);

  const SamplingGrid& grid = trace.grid;
  const Index window = window_samples(grid, cfg.observation_window);
  const double reach = 1.01 * model_b.tail_end(kIsiFraction) + grid.dt;
  LogFactorial log_fact;

  SyncResult out;
  out.scheme = Scheme::ml;
  out.starts.assign(1, 0.0);
  for (std::size_t k = 1; k < static_cast<std::size_t>(spec.symbols); ++k) {
    const double anchor = anchor_for(k, cfg.anchor, out.starts, true_starts);
    const Index lo = grid.first_at_or_after(anchor + spec.t_min);
    const Index hi = std::min(grid.last_at_or_before(anchor + spec.t_max),
                              grid.size - window);
    if (lo > hi) throw std::out_of_range("ML search set leaves the trace");

    const std::span<const double> prev =
        cfg.anchor == Anchor::genie ? true_starts.first(k)
                                    : std::span<const double>(out.starts);
    Eigen::ArrayXd base = Eigen::ArrayXd::Zero(hi - lo + window);
    for (double s : prev) {
      if (grid.time(lo) - s > reach) continue;
      accumulate_pulse(base, lo, grid, model_b, s);
    }

    Index best = -1;
    double best_metric = kNegInf;
    for (Index h = lo; h <= hi; ++h) {
      const double m = window_metric(trace, h, window, base, lo, model_b, log_fact);
      if (m > best_metric) {
        best_metric = m;
        best = h;
      }
    }
    if (best < 0) throw std::runtime_error("every ML hypothesis is impossible");
    out.starts.push_back(grid.time(best));
  }
  return out;
}

SyncResult po_synchronize(const ObservationTrace& trace,
                          const IntervalSpec& spec, const PoConfig& cfg,
                          std::span<const double> true_starts) {
  spec.validate();
  cfg.validate();
  require_truth(cfg.anchor, true_starts, spec);

  const SamplingGrid& grid = trace.grid;
  SyncResult out;
  out.scheme = Scheme::po;
  out.starts.assign(1, 0.0);
  for (std::size_t k = 1; k < static_cast<std::size_t>(spec.symbols); ++k) {
    const double anchor = anchor_for(k, cfg.anchor, out.starts, true_starts);
    const Index lo = grid.first_at_or_after(anchor + spec.t_min + cfg.peak_time);
    const Index hi = std::min(
        grid.last_at_or_before(anchor + spec.t_max + cfg.peak_time), grid.size - 1);
    if (lo > hi) throw std::out_of_range("peak window leaves the trace");
    Index best = lo;
    for (Index n = lo + 1; n <= hi; ++n) {
      if (trace.b[n] > trace.b[best]) best = n;
    }
    out.starts.push_back(grid.time(best) - cfg.peak_time);
  }
  return out;
}

SyncResult tt_synchronize(const ObservationTrace& trace, const TtConfig& cfg) {
  if (!(cfg.threshold > 0.0) || !(cfg.detection_window > 0.0)) {
    throw std::invalid_argument("TT threshold and detection window must be positive");
  }
  const SamplingGrid& grid = trace.grid;
  const Index min_len = grid.steps(cfg.detection_window);
  const Index size = grid.size;
  SyncResult out;
  out.scheme = Scheme::tt;

  Index n = 0;  // first sample after the previous zone
  while (n < size) {
    while (n < size && trace.b[n] < cfg.threshold) ++n;
    if (n == size) break;
    const Index start = n;
    Index down = start + 1;
    while (down < size && trace.b[down] > cfg.threshold) ++down;
    // `down` may be past the trace end; the zone is then clipped.
    const Index end = std::min(std::max(down, start + min_len), size - 1);
    out.zones.push_back({start, end});
    n = end + 1;
  }
  return out;
}

SyncResult perfect_sync(const Timeline& timeline) {
  SyncResult out;
  out.scheme = Scheme::perfect;
  out.starts = timeline.starts;
  return out;
}

}  // namespace molsync
