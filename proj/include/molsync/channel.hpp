#ifndef MOLSYNC_CHANNEL_HPP
#define MOLSYNC_CHANNEL_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace molsync {

/// Physical parameters of the diffusive link. The forward/backward reaction
/// rates and the receptor count are carried for configuration fidelity only;
/// the built-in pulse shapes do not consume them.
struct ChannelParams {
  double diffusion_coefficient = 5e-9;  // m^2/s
  double distance = 2e-6;               // transmitter to receiver centre, m
  double receiver_radius = 1e-6;        // m
  double released_count = 1e3;          // molecules per release
  double forward_rate = 25e-14;         // m^3/(molecule s)
  double backward_rate = 5e4;           // 1/s
  double receptor_count = 1e3;

  void validate() const;
};

/// Shape of a single-release pulse, P(t). Implementations must return 0 for
/// t <= 0 and be non-negative everywhere.
class PulseShape {
 public:
  virtual ~PulseShape() = default;
  virtual double operator()(double t) const = 0;
  /// Closed-form peak location, or a negative value if none is known.
  virtual double analytic_peak_time() const { return -1.0; }
  /// Time span over which a numeric peak search should look.
  virtual double search_horizon() const = 0;
  virtual std::string kind() const = 0;
};

struct SnrSpec {
  double snr_db = 10.0;
};

struct PulsePeak {
  double time = 0.0;
  double value = 0.0;
};

/// Expected bound-molecule response of one molecule type: pulse shape, peak
/// and additive noise floor. Immutable and cheap to copy; copies share the
/// underlying shape.
class ChannelModel {
 public:
  /// P(t) = peak_value (t/peak_time) exp(1 - t/peak_time), t > 0.
  static ChannelModel gamma_pulse(double peak_value, double peak_time,
                                  double noise = 0.0);

  /// Scaled first-hitting-time density of an absorbing sphere. The scale is
  /// chosen so that the peak equals N (rr/r0) bound_fraction.
  static ChannelModel hitting_rate(const ChannelParams& params,
                                   double bound_fraction = 0.1,
                                   double noise = 0.0);

  /// Piecewise-linear pulse through (times[i], values[i]); zero outside
  /// (0, times.back()]. The peak is located numerically with grid step `dt`.
  static ChannelModel tabulated(std::vector<double> times,
                                std::vector<double> values, double dt,
                                double noise = 0.0);

  /// Arbitrary pulse. The peak is located numerically on a `dt` grid over
  /// [0, horizon].
  static ChannelModel from_function(std::function<double(double)> pulse,
                                    double horizon, double dt,
                                    double noise = 0.0);

  double operator()(double t) const { return (*shape_)(t) * scale_; }
  double noise() const { return noise_; }
  double peak_time() const { return peak_.time; }
  double peak_value() const { return peak_.value; }
  PulsePeak peak() const { return peak_; }
  std::string kind() const { return shape_->kind(); }

  /// Smallest time after the peak beyond which P(t) <= fraction * peak_value.
  /// Only meaningful for unimodal pulses.
  double tail_end(double fraction) const;

  ChannelModel with_noise(double noise) const;
  ChannelModel scaled(double factor) const;

 private:
  ChannelModel(std::shared_ptr<const PulseShape> shape, double scale,
               PulsePeak peak, double noise);

  std::shared_ptr<const PulseShape> shape_;
  double scale_ = 1.0;
  PulsePeak peak_;
  double noise_ = 0.0;
};

inline double eval_pulse(const ChannelModel& model, double t) {
  return model(t);
}

/// Sets the noise floor so that peak_value / noise matches the requested SNR.
ChannelModel calibrate_noise(const ChannelModel& model, SnrSpec snr);

/// Peak of a pulse. Closed form when the shape provides one; otherwise a
/// grid search on a `dt` grid refined by golden-section search to 1e-3 dt.
/// Throws std::domain_error if the pulse is identically zero on the grid.
PulsePeak peak_of_pulse(const PulseShape& shape, double dt);
inline PulsePeak peak_of_pulse(const ChannelModel& model) {
  return model.peak();
}

}  // namespace molsync

#endif  // MOLSYNC_CHANNEL_HPP
