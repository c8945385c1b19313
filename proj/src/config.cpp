#include "molsync/config.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <thread>

namespace molsync {

using nlohmann::json;

namespace {

constexpr double kMs = 1e-3;
constexpr double kUs = 1e-6;

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw std::invalid_argument(std::string(where) + " must be an object");
  }
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " +
                                  std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_scaled(const json& obj, const char* key, double scale, double& out) {
  if (obj.contains(key)) out = obj.at(key).get<double>() * scale;
}

std::vector<double> scalar_or_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<double>>();
  return {v.get<double>()};
}

std::vector<double> scaled_list(const json& v, double scale) {
  auto out = v.get<std::vector<double>>();
  for (double& x : out) x *= scale;
  return out;
}

void check_thresholds(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

}  // namespace

std::pair<ChannelModel, ChannelModel> ChannelConfig::build(double dt) const {
  auto calibrate = [&](ChannelModel m, double snr) {
    return calibrate_noise(m, SnrSpec{snr});
  };
  if (model == "gamma") {
    return {calibrate(ChannelModel::gamma_pulse(peak_value_a, peak_time), snr_db_a),
            calibrate(ChannelModel::gamma_pulse(peak_value_b, peak_time), snr_db_b)};
  }
  if (model == "hitting-rate") {
    ChannelParams pb = params;
    pb.released_count = released_b;
    pb.receptor_count = receptors_b;
    return {calibrate(ChannelModel::hitting_rate(params, bound_fraction), snr_db_a),
            calibrate(ChannelModel::hitting_rate(pb, bound_fraction), snr_db_b)};
  }
  if (model == "table") {
    return {calibrate(ChannelModel::tabulated(table_times, table_a, dt), snr_db_a),
            calibrate(ChannelModel::tabulated(table_times, table_b, dt), snr_db_b)};
  }
  throw std::invalid_argument("unknown channel model: " + model);
}

ExperimentConfig ExperimentConfig::defaults() { return ExperimentConfig{}; }

bool ExperimentConfig::runs(Scheme s) const {
  return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

void ExperimentConfig::validate() const {
  interval.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (schemes.empty()) throw std::invalid_argument("no synchronization scheme selected");
  if (detectors.empty()) throw std::invalid_argument("no detector selected");
  if (blocks == 0) throw std::invalid_argument("blocks must be positive");
  if (!(histogram_bin > 0.0)) throw std::invalid_argument("histogram bin must be positive");
  (void)channel.build(dt);
  if (channel.model == "hitting-rate") channel.params.validate();
  if (runs(Scheme::ml)) ml.validate(interval);
  if (runs(Scheme::tt)) {
    check_thresholds(xi_b, "tt.xi_b");
    for (double xi : xi_b) TtConfig{xi, tt_detection_window}.validate(interval);
  }
  for (DetectorKind d : detectors) {
    const auto it = xi_a.find(d);
    if (it == xi_a.end()) {
      throw std::invalid_argument("no xi_a given for detector " + std::string(to_string(d)));
    }
    check_thresholds(it->second, "detector.xi_a");
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, "config", {"channel", "timing", "scheme", "ml", "po", "tt",
                               "detector", "run"});
  ExperimentConfig c;

  if (j.contains("channel")) {
    const json& ch = j.at("channel");
    reject_unknown(ch, "channel", {"model", "snr_db_a", "snr_db_b", "gamma",
                                   "params", "table"});
    auto& cc = c.channel;
    read(ch, "model", cc.model);
    read(ch, "snr_db_a", cc.snr_db_a);
    read(ch, "snr_db_b", cc.snr_db_b);
    if (ch.contains("gamma")) {
      const json& g = ch.at("gamma");
      reject_unknown(g, "channel.gamma", {"peak_value_a", "peak_value_b", "peak_time_ms"});
      read(g, "peak_value_a", cc.peak_value_a);
      read(g, "peak_value_b", cc.peak_value_b);
      read_scaled(g, "peak_time_ms", kMs, cc.peak_time);
    }
    if (ch.contains("params")) {
      const json& p = ch.at("params");
      reject_unknown(p, "channel.params", {"D", "r0_um", "rr_um", "N_a", "N_b", "kf",
                                           "kr", "n_a", "n_b", "bound_fraction"});
      read(p, "D", cc.params.diffusion_coefficient);
      read_scaled(p, "r0_um", kUs, cc.params.distance);
      read_scaled(p, "rr_um", kUs, cc.params.receiver_radius);
      read(p, "N_a", cc.params.released_count);
      read(p, "N_b", cc.released_b);
      read(p, "kf", cc.params.forward_rate);
      read(p, "kr", cc.params.backward_rate);
      read(p, "n_a", cc.params.receptor_count);
      read(p, "n_b", cc.receptors_b);
      read(p, "bound_fraction", cc.bound_fraction);
    }
    if (ch.contains("table")) {
      const json& t = ch.at("table");
      reject_unknown(t, "channel.table", {"times_ms", "values_a", "values_b"});
      cc.table_times = scaled_list(t.at("times_ms"), kMs);
      cc.table_a = t.at("values_a").get<std::vector<double>>();
      cc.table_b = t.at("values_b").get<std::vector<double>>();
    }
  }

  if (j.contains("timing")) {
    const json& t = j.at("timing");
    reject_unknown(t, "timing", {"t_min_ms", "t_max_ms", "K", "dt_us"});
    read_scaled(t, "t_min_ms", kMs, c.interval.t_min);
    read_scaled(t, "t_max_ms", kMs, c.interval.t_max);
    read(t, "K", c.interval.symbols);
    read_scaled(t, "dt_us", kUs, c.dt);
  }
  c.ml.observation_window = c.interval.t_min;
  c.tt_detection_window = c.interval.t_min;

  if (j.contains("scheme")) {
    const json& s = j.at("scheme");
    c.schemes.clear();
    if (s.is_array()) {
      for (const auto& name : s) c.schemes.push_back(parse_scheme(name.get<std::string>()));
    } else {
      c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
  }
  if (j.contains("ml")) {
    const json& m = j.at("ml");
    reject_unknown(m, "ml", {"t_ow_ms", "genie"});
    read_scaled(m, "t_ow_ms", kMs, c.ml.observation_window);
    if (m.value("genie", false)) c.ml.anchor = Anchor::genie;
  }
  if (j.contains("po")) {
    const json& p = j.at("po");
    reject_unknown(p, "po", {"genie"});
    if (p.value("genie", false)) c.po_anchor = Anchor::genie;
  }
  if (j.contains("tt")) {
    const json& t = j.at("tt");
    reject_unknown(t, "tt", {"xi_b", "t_dw_ms"});
    if (t.contains("xi_b")) c.xi_b = scalar_or_list(t.at("xi_b"));
    read_scaled(t, "t_dw_ms", kMs, c.tt_detection_window);
  }
  if (j.contains("detector")) {
    const json& d = j.at("detector");
    reject_unknown(d, "detector", {"kind", "xi_a"});
    if (d.contains("kind")) {
      const json& k = d.at("kind");
      c.detectors.clear();
      if (k.is_array()) {
        for (const auto& name : k) c.detectors.push_back(parse_detector(name.get<std::string>()));
      } else {
        c.detectors.push_back(parse_detector(k.get<std::string>()));
      }
    }
    if (d.contains("xi_a")) {
      const json& x = d.at("xi_a");
      if (x.is_object()) {
        reject_unknown(x, "detector.xi_a", {"mean", "peak"});
        for (const auto& item : x.items()) {
          c.xi_a[parse_detector(item.key())] = scalar_or_list(item.value());
        }
      } else {
        for (DetectorKind kind : {DetectorKind::mean, DetectorKind::peak}) {
          c.xi_a[kind] = scalar_or_list(x);
        }
      }
    }
  }
  if (j.contains("run")) {
    const json& r = j.at("run");
    reject_unknown(r, "run", {"blocks", "ml_blocks", "seed", "timing_seed",
                              "symbol_seed", "threads", "histogram_bin", "out"});
    read(r, "blocks", c.blocks);
    read(r, "ml_blocks", c.ml_blocks);
    read(r, "seed", c.seed);
    c.timing_seed = c.seed;
    c.symbol_seed = c.seed;
    read(r, "timing_seed", c.timing_seed);
    read(r, "symbol_seed", c.symbol_seed);
    read(r, "threads", c.threads);
    read(r, "histogram_bin", c.histogram_bin);
    if (r.contains("out")) c.output_dir = r.at("out").get<std::string>();
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + file.string() + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  const auto& cc = channel;
  json ch = {{"model", cc.model}, {"snr_db_a", cc.snr_db_a}, {"snr_db_b", cc.snr_db_b}};
  if (cc.model == "gamma") {
    ch["gamma"] = {{"peak_value_a", cc.peak_value_a},
                   {"peak_value_b", cc.peak_value_b},
                   {"peak_time_ms", cc.peak_time / kMs}};
  } else if (cc.model == "hitting-rate") {
    ch["params"] = {{"D", cc.params.diffusion_coefficient},
                    {"r0_um", cc.params.distance / kUs},
                    {"rr_um", cc.params.receiver_radius / kUs},
                    {"N_a", cc.params.released_count},
                    {"N_b", cc.released_b},
                    {"kf", cc.params.forward_rate},
                    {"kr", cc.params.backward_rate},
                    {"n_a", cc.params.receptor_count},
                    {"n_b", cc.receptors_b},
                    {"bound_fraction", cc.bound_fraction}};
  } else {
    std::vector<double> times_ms = cc.table_times;
    for (double& t : times_ms) t /= kMs;
    ch["table"] = {{"times_ms", times_ms}, {"values_a", cc.table_a}, {"values_b", cc.table_b}};
  }

  json schemes = json::array();
  for (Scheme s : this->schemes) schemes.push_back(std::string(to_string(s)));
  json kinds = json::array();
  json xi = json::object();
  for (DetectorKind d : detectors) {
    kinds.push_back(std::string(to_string(d)));
    if (auto it = xi_a.find(d); it != xi_a.end()) xi[std::string(to_string(d))] = it->second;
  }
  return {
      {"channel", ch},
      {"timing", {{"t_min_ms", interval.t_min / kMs},
                  {"t_max_ms", interval.t_max / kMs},
                  {"K", interval.symbols},
                  {"dt_us", std::round(dt / kUs * 1e6) / 1e6}}},
      {"scheme", schemes},
      {"ml", {{"t_ow_ms", ml.observation_window / kMs}, {"genie", ml.anchor == Anchor::genie}}},
      {"po", {{"genie", po_anchor == Anchor::genie}}},
      {"tt", {{"xi_b", xi_b}, {"t_dw_ms", tt_detection_window / kMs}}},
      {"detector", {{"kind", kinds}, {"xi_a", xi}}},
      {"run", {{"blocks", blocks},
               {"ml_blocks", ml_blocks},
               {"seed", seed},
               {"timing_seed", timing_seed},
               {"symbol_seed", symbol_seed},
               {"threads", threads},
               {"histogram_bin", histogram_bin},
               {"out", output_dir.string()}}},
  };
}

ExperimentConfig ExperimentConfig::with_mean_interval(double mean) const {
  ExperimentConfig c = *this;
  const double ratio = interval.t_max / interval.t_min;
  c.interval.t_min = 2.0 * mean / (1.0 + ratio);
  c.interval.t_max = ratio * c.interval.t_min;
  c.ml.observation_window = c.interval.t_min;
  c.tt_detection_window = c.interval.t_min;
  return c;
}

}  // namespace molsync
