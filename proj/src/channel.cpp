#include "molsync/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace molsync {

namespace {

class GammaPulse final : public PulseShape {
 public:
  GammaPulse(double peak_value, double peak_time)
      : peak_value_(peak_value), peak_time_(peak_time) {}

  double operator()(double t) const override {
    if (!(t > 0.0)) return 0.0;
    const double x = t / peak_time_;
    return peak_value_ * x * std::exp(1.0 - x);
  }
  double analytic_peak_time() const override { return peak_time_; }
  double search_horizon() const override { return 50.0 * peak_time_; }
  std::string kind() const override { return "gamma"; }

 private:
  double peak_value_;
  double peak_time_;
};

// Unnormalized first-hitting-time density of a Brownian particle started at
// r0 on an absorbing sphere of radius rr.
class HittingRatePulse final : public PulseShape {
 public:
  explicit HittingRatePulse(const ChannelParams& p)
      : gap_(p.distance - p.receiver_radius),
        ratio_(p.receiver_radius / p.distance),
        diffusion_(p.diffusion_coefficient) {}

  double operator()(double t) const override {
    if (!(t > 0.0)) return 0.0;
    return ratio_ * gap_ / std::sqrt(4.0 * std::numbers::pi * diffusion_ * t * t * t) *
           std::exp(-gap_ * gap_ / (4.0 * diffusion_ * t));
  }
  double analytic_peak_time() const override {
    return gap_ * gap_ / (6.0 * diffusion_);
  }
  double search_horizon() const override { return 1000.0 * analytic_peak_time(); }
  std::string kind() const override { return "hitting-rate"; }

 private:
  double gap_;
  double ratio_;
  double diffusion_;
};

class TablePulse final : public PulseShape {
 public:
  TablePulse(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {}

  double operator()(double t) const override {
    if (!(t > 0.0) || t > times_.back()) return 0.0;
    auto hi = std::upper_bound(times_.begin(), times_.end(), t);
    if (hi == times_.begin()) {
      // Linear ramp from (0, 0) to the first knot.
      return values_.front() * t / times_.front();
    }
    if (hi == times_.end()) return values_.back();
    const auto i = static_cast<std::size_t>(hi - times_.begin());
    const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
  }
  double search_horizon() const override { return times_.back(); }
  std::string kind() const override { return "table"; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

class FunctionPulse final : public PulseShape {
 public:
  FunctionPulse(std::function<double(double)> fn, double horizon)
      : fn_(std::move(fn)), horizon_(horizon) {}

  double operator()(double t) const override {
    if (!(t > 0.0)) return 0.0;
    return std::max(0.0, fn_(t));
  }
  double search_horizon() const override { return horizon_; }
  std::string kind() const override { return "function"; }

 private:
  std::function<double(double)> fn_;
  double horizon_;
};

double golden_section_max(const PulseShape& f, double lo, double hi,
                          double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void ChannelParams::validate() const {
  const double fields[] = {diffusion_coefficient, distance,     receiver_radius,
                           released_count,        forward_rate, backward_rate,
                           receptor_count};
  for (double v : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("channel parameters must be strictly positive");
    }
  }
  if (!(distance > receiver_radius)) {
    throw std::invalid_argument("transmitter must lie outside the receiver");
  }
}

ChannelModel::ChannelModel(std::shared_ptr<const PulseShape> shape,
                           double scale, PulsePeak peak, double noise)
    : shape_(std::move(shape)), scale_(scale), peak_(peak), noise_(noise) {
  if (!(noise_ >= 0.0) || !std::isfinite(noise_)) {
    throw std::invalid_argument("noise floor must be finite and non-negative");
  }
  if (!(peak_.value > 0.0)) {
    throw std::invalid_argument("pulse peak must be positive");
  }
}

ChannelModel ChannelModel::gamma_pulse(double peak_value, double peak_time,
                                       double noise) {
  if (!(peak_value > 0.0) || !(peak_time > 0.0)) {
    throw std::invalid_argument("gamma pulse needs positive peak value and time");
  }
  return ChannelModel(std::make_shared<GammaPulse>(peak_value, peak_time), 1.0,
                      {peak_time, peak_value}, noise);
}

ChannelModel ChannelModel::hitting_rate(const ChannelParams& params,
                                        double bound_fraction, double noise) {
  params.validate();
  if (!(bound_fraction > 0.0)) {
    throw std::invalid_argument("bound fraction must be positive");
  }
  auto shape = std::make_shared<HittingRatePulse>(params);
  const double t_p = shape->analytic_peak_time();
  const double target = params.released_count *
                        (params.receiver_radius / params.distance) *
                        bound_fraction;
  const double scale = target / (*shape)(t_p);
  return ChannelModel(std::move(shape), scale, {t_p, target}, noise);
}

ChannelModel ChannelModel::tabulated(std::vector<double> times,
                                     std::vector<double> values, double dt,
                                     double noise) {
  if (times.empty() || times.size() != values.size()) {
    throw std::invalid_argument("pulse table needs matching, non-empty columns");
  }
  if (!(times.front() > 0.0) ||
      std::adjacent_find(times.begin(), times.end(),
                         [](double a, double b) { return !(a < b); }) !=
          times.end()) {
    throw std::invalid_argument("pulse table times must be positive and increasing");
  }
  if (std::any_of(values.begin(), values.end(),
                  [](double v) { return !(v >= 0.0); })) {
    throw std::invalid_argument("pulse table values must be non-negative");
  }
  auto shape = std::make_shared<TablePulse>(std::move(times), std::move(values));
  const PulsePeak peak = peak_of_pulse(*shape, dt);
  return ChannelModel(std::move(shape), 1.0, peak, noise);
}

ChannelModel ChannelModel::from_function(std::function<double(double)> pulse,
                                         double horizon, double dt,
                                         double noise) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  auto shape = std::make_shared<FunctionPulse>(std::move(pulse), horizon);
  const PulsePeak peak = peak_of_pulse(*shape, dt);
  return ChannelModel(std::move(shape), 1.0, peak, noise);
}

double ChannelModel::tail_end(double fraction) const {
  const double level = fraction * peak_.value;
  double lo = peak_.time;
  double step = std::max(peak_.time, 1e-12);
  double hi = lo + step;
  int guard = 0;
  while ((*this)(hi) > level) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (++guard > 200) throw std::domain_error("pulse tail does not decay");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

ChannelModel ChannelModel::with_noise(double noise) const {
  return ChannelModel(shape_, scale_, peak_, noise);
}

ChannelModel ChannelModel::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale must be positive");
  return ChannelModel(shape_, scale_ * factor,
                      {peak_.time, peak_.value * factor}, noise_);
}

ChannelModel calibrate_noise(const ChannelModel& model, SnrSpec snr) {
  if (!std::isfinite(snr.snr_db)) {
    throw std::invalid_argument("SNR must be finite");
  }
  return model.with_noise(model.peak_value() / std::pow(10.0, snr.snr_db / 10.0));
}

PulsePeak peak_of_pulse(const PulseShape& shape, double dt) {
  const double analytic = shape.analytic_peak_time();
  if (analytic > 0.0) return {analytic, shape(analytic)};
  if (!(dt > 0.0)) throw std::invalid_argument("grid step must be positive");

  const auto steps = static_cast<std::size_t>(
      std::min(std::ceil(shape.search_horizon() / dt), 1e8));
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double v = shape(static_cast<double>(n) * dt);
    if (v > best_value) {
      best_value = v;
      best = n;
    }
  }
  if (best == 0) throw std::domain_error("pulse is identically zero");

  const double lo = static_cast<double>(best - 1) * dt;
  const double hi = static_cast<double>(best + 1) * dt;
  const double t = golden_section_max(shape, lo, hi, 1e-3 * dt);
  const double v = shape(t);
  if (v >= best_value) return {t, v};
  return {static_cast<double>(best) * dt, best_value};
}

}  // namespace molsync
