#ifndef MOLSYNC_SYNC_HPP
#define MOLSYNC_SYNC_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molsync/channel.hpp"
#include "molsync/observe.hpp"
#include "molsync/timeline.hpp"

namespace molsync {

enum class Scheme { perfect, ml, po, tt };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Where the k-th search window is anchored: the scheme's own previous
/// estimate, or the true previous start.
enum class Anchor { estimated, genie };

struct MlConfig {
  double observation_window = 0.8e-3;  // T_ow, must not exceed t_min
  Anchor anchor = Anchor::estimated;

  void validate(const IntervalSpec& spec) const;
};

struct PoConfig {
  double peak_time = 0.0;  // t_p of the synchronization pulse
  Anchor anchor = Anchor::estimated;

  void validate() const;
};

struct TtConfig {
  double threshold = 13.0;            // xi_B
  double detection_window = 0.8e-3;   // T_dw, must not exceed t_min

  void validate(const IntervalSpec& spec) const;
};

/// Closed sample range [first, last] over which r_B stayed triggered.
struct Zone {
  Index first = 0;
  Index last = 0;
};

struct SyncResult {
  Scheme scheme = Scheme::perfect;
  /// Estimated interval starts (perfect, ML, PO). starts[0] is the known
  /// anchor t = 0.
  std::vector<double> starts;
  /// Detection zones (TT only); their count may differ from the symbol count.
  std::vector<Zone> zones;
};

/// Poisson log-likelihood of r_B over [t, t + T_ow] given releases at
/// `prev_starts` (ascending) and a hypothesized release at sample
/// `hypothesis`. Returns -infinity if a sample with zero mean has a
/// nonzero count.
double ml_log_likelihood(const ObservationTrace& trace, Index hypothesis,
                         std::span<const double> prev_starts,
                         const ChannelModel& model_b,
                         double observation_window);

/// Symbol-by-symbol ML start estimation. The first start is the known
/// anchor t = 0; for k >= 1 every grid instant in
/// [anchor + t_min, anchor + t_max] is scored and the earliest maximizer
/// kept. `true_starts` is required in genie mode.
SyncResult ml_synchronize(const ObservationTrace& trace,
                          const IntervalSpec& spec,
                          const ChannelModel& model_b, const MlConfig& cfg,
                          std::span<const double> true_starts = {});

/// Peak-observation estimation: the earliest maximum of r_B over
/// [anchor + t_min + t_p, anchor + t_max + t_p], shifted back by t_p.
SyncResult po_synchronize(const ObservationTrace& trace,
                          const IntervalSpec& spec, const PoConfig& cfg,
                          std::span<const double> true_starts = {});

/// Threshold-trigger detection zones over the whole trace.
SyncResult tt_synchronize(const ObservationTrace& trace, const TtConfig& cfg);

/// The true starts, for reference runs.
SyncResult perfect_sync(const Timeline& timeline);

}  // namespace molsync

#endif  // MOLSYNC_SYNC_HPP
