#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "atr/error.hpp"
#include "atr/experiment.hpp"
#include "io_util.hpp"

namespace atr {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), d);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': invalid number '" + v + "'");
  }
  return d;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t u = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), u);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': invalid non-negative integer '" + v + "'");
  }
  return u;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
  return s;
}

std::string fmt_d(double d) { return io::format_double(d); }
std::string fmt_u(std::size_t u) { return std::to_string(u); }
std::string fmt_b(bool b) { return b ? "true" : "false"; }

struct Key {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<Key> k = {
      {"grid_file", [](C& c, S v) { c.grid_file = v; }, [](const C& c) { return c.grid_file; }},
      {"grid_seed", [](C& c, S v) { c.grid_seed = parse_uint("grid_seed", v); },
       [](const C& c) { return std::to_string(c.grid_seed); }},
      {"classes", [](C& c, S v) { c.classes = parse_uint("classes", v); },
       [](const C& c) { return fmt_u(c.classes); }},
      {"synth_mean_level_dbsm", [](C& c, S v) { c.synth.mean_level_dbsm = parse_double("synth_mean_level_dbsm", v); },
       [](const C& c) { return fmt_d(c.synth.mean_level_dbsm); }},
      {"synth_class_offset_db", [](C& c, S v) { c.synth.class_offset_db = parse_double("synth_class_offset_db", v); },
       [](const C& c) { return fmt_d(c.synth.class_offset_db); }},
      {"synth_spectral_tilt_db", [](C& c, S v) { c.synth.spectral_tilt_db = parse_double("synth_spectral_tilt_db", v); },
       [](const C& c) { return fmt_d(c.synth.spectral_tilt_db); }},
      {"synth_spectral_ripple_db", [](C& c, S v) { c.synth.spectral_ripple_db = parse_double("synth_spectral_ripple_db", v); },
       [](const C& c) { return fmt_d(c.synth.spectral_ripple_db); }},
      {"synth_ripple_terms", [](C& c, S v) { c.synth.ripple_terms = static_cast<int>(parse_uint("synth_ripple_terms", v)); },
       [](const C& c) { return std::to_string(c.synth.ripple_terms); }},
      {"synth_angular_amplitude_db", [](C& c, S v) { c.synth.angular_amplitude_db = parse_double("synth_angular_amplitude_db", v); },
       [](const C& c) { return fmt_d(c.synth.angular_amplitude_db); }},
      {"synth_harmonics", [](C& c, S v) { c.synth.harmonics = static_cast<int>(parse_uint("synth_harmonics", v)); },
       [](const C& c) { return std::to_string(c.synth.harmonics); }},
      {"radar_counts",
       [](C& c, S v) {
         c.radar_counts.clear();
         for (const auto& s : split_list(v)) c.radar_counts.push_back(parse_uint("radar_counts", s));
       },
       [](const C& c) { return join(c.radar_counts, fmt_u); }},
      {"snr_db",
       [](C& c, S v) {
         c.snr_db.clear();
         for (const auto& s : split_list(v)) c.snr_db.push_back(parse_double("snr_db", s));
       },
       [](const C& c) { return join(c.snr_db, fmt_d); }},
      {"jitter_deg",
       [](C& c, S v) {
         c.jitter_deg.clear();
         for (const auto& s : split_list(v)) c.jitter_deg.push_back(parse_double("jitter_deg", s));
       },
       [](const C& c) { return join(c.jitter_deg, fmt_d); }},
      {"fusion_rules",
       [](C& c, S v) {
         c.fusion_rules.clear();
         for (const auto& s : split_list(v)) c.fusion_rules.push_back(parse_fusion_kind(s));
       },
       [](const C& c) { return join(c.fusion_rules, [](FusionKind k) { return to_string(k); }); }},
      {"models",
       [](C& c, S v) {
         c.models.clear();
         for (const auto& s : split_list(v)) c.models.push_back(parse_model_kind(s));
       },
       [](const C& c) { return join(c.models, [](ModelKind k) { return to_string(k); }); }},
      {"trials", [](C& c, S v) { c.trials = parse_uint("trials", v); },
       [](const C& c) { return fmt_u(c.trials); }},
      {"trajectories_per_class", [](C& c, S v) { c.trajectories_per_class = parse_uint("trajectories_per_class", v); },
       [](const C& c) { return fmt_u(c.trajectories_per_class); }},
      {"train_size", [](C& c, S v) { c.train_size = parse_uint("train_size", v); },
       [](const C& c) { return fmt_u(c.train_size); }},
      {"train_snr_db",
       [](C& c, S v) {
         if (v == "match") c.train_snr_db.reset();
         else c.train_snr_db = parse_double("train_snr_db", v);
       },
       [](const C& c) { return c.train_snr_db ? fmt_d(*c.train_snr_db) : std::string("match"); }},
      {"retrain",
       [](C& c, S v) {
         if (v == "per_trial") c.retrain = RetrainMode::PerTrial;
         else if (v == "once") c.retrain = RetrainMode::Once;
         else throw ConfigError("config key 'retrain': expected per_trial or once");
       },
       [](const C& c) { return std::string(c.retrain == RetrainMode::PerTrial ? "per_trial" : "once"); }},
      {"use_angles", [](C& c, S v) { c.use_angles = parse_bool("use_angles", v); },
       [](const C& c) { return fmt_b(c.use_angles); }},
      {"hard_epsilon", [](C& c, S v) { c.hard_epsilon = parse_double("hard_epsilon", v); },
       [](const C& c) { return fmt_d(c.hard_epsilon); }},
      {"radar_half_width_m", [](C& c, S v) { c.radar_half_width_m = parse_double("radar_half_width_m", v); },
       [](const C& c) { return fmt_d(c.radar_half_width_m); }},
      {"steps", [](C& c, S v) { c.kinematics.steps = parse_uint("steps", v); },
       [](const C& c) { return fmt_u(c.kinematics.steps); }},
      {"dt_s", [](C& c, S v) { c.kinematics.dt_s = parse_double("dt_s", v); },
       [](const C& c) { return fmt_d(c.kinematics.dt_s); }},
      {"velocity_mps", [](C& c, S v) { c.kinematics.velocity_mps = parse_double("velocity_mps", v); },
       [](const C& c) { return fmt_d(c.kinematics.velocity_mps); }},
      {"yaw_noise", [](C& c, S v) { c.kinematics.yaw_noise_param = parse_double("yaw_noise", v); },
       [](const C& c) { return fmt_d(c.kinematics.yaw_noise_param); }},
      {"roll_noise", [](C& c, S v) { c.kinematics.roll_noise_param = parse_double("roll_noise", v); },
       [](const C& c) { return fmt_d(c.kinematics.roll_noise_param); }},
      {"noise_param_mode",
       [](C& c, S v) {
         if (v == "variance") c.kinematics.noise_mode = NoiseParamMode::Variance;
         else if (v == "stddev") c.kinematics.noise_mode = NoiseParamMode::StdDev;
         else throw ConfigError("config key 'noise_param_mode': expected variance or stddev");
       },
       [](const C& c) {
         return std::string(c.kinematics.noise_mode == NoiseParamMode::Variance ? "variance" : "stddev");
       }},
      {"logreg_epochs", [](C& c, S v) { c.logreg.epochs = parse_uint("logreg_epochs", v); },
       [](const C& c) { return fmt_u(c.logreg.epochs); }},
      {"logreg_learning_rate", [](C& c, S v) { c.logreg.learning_rate = parse_double("logreg_learning_rate", v); },
       [](const C& c) { return fmt_d(c.logreg.learning_rate); }},
      {"logreg_l2", [](C& c, S v) { c.logreg.l2 = parse_double("logreg_l2", v); },
       [](const C& c) { return fmt_d(c.logreg.l2); }},
      {"mlp_hidden",
       [](C& c, S v) {
         c.mlp.hidden.clear();
         for (const auto& s : split_list(v)) c.mlp.hidden.push_back(parse_uint("mlp_hidden", s));
       },
       [](const C& c) { return join(c.mlp.hidden, fmt_u); }},
      {"mlp_epochs", [](C& c, S v) { c.mlp.epochs = parse_uint("mlp_epochs", v); },
       [](const C& c) { return fmt_u(c.mlp.epochs); }},
      {"mlp_learning_rate", [](C& c, S v) { c.mlp.learning_rate = parse_double("mlp_learning_rate", v); },
       [](const C& c) { return fmt_d(c.mlp.learning_rate); }},
      {"mlp_momentum", [](C& c, S v) { c.mlp.momentum = parse_double("mlp_momentum", v); },
       [](const C& c) { return fmt_d(c.mlp.momentum); }},
      {"mlp_batch_size", [](C& c, S v) { c.mlp.batch_size = parse_uint("mlp_batch_size", v); },
       [](const C& c) { return fmt_u(c.mlp.batch_size); }},
      {"mlp_l2", [](C& c, S v) { c.mlp.l2 = parse_double("mlp_l2", v); },
       [](const C& c) { return fmt_d(c.mlp.l2); }},
      {"base_seed", [](C& c, S v) { c.base_seed = parse_uint("base_seed", v); },
       [](const C& c) { return std::to_string(c.base_seed); }},
  };
  return k;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (grid_file.empty() && classes < 2) throw ConfigError("classes must be >= 2");
  if (radar_counts.empty() || snr_db.empty() || jitter_deg.empty() || fusion_rules.empty() ||
      models.empty()) {
    throw ConfigError("radar_counts, snr_db, jitter_deg, fusion_rules and models must be non-empty");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (trajectories_per_class < 1) throw ConfigError("trajectories_per_class must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  for (std::size_t j : radar_counts) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(j))));
    if (j == 0 || side * side != j) {
      throw ConfigError("radar count " + std::to_string(j) + " is not a perfect square");
    }
  }
  for (double a : jitter_deg)
    if (!(a >= 0.0)) throw ConfigError("jitter half-widths must be >= 0");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw ConfigError("snr values must be finite");
  if (!(hard_epsilon > 0.0 && hard_epsilon < 1.0)) throw ConfigError("hard_epsilon must be in (0, 1)");
  if (!(radar_half_width_m > 0.0)) throw ConfigError("radar_half_width_m must be > 0");
  if (grid_file.empty() && train_size < classes) throw ConfigError("train_size must be >= classes");
  kinematics.validate();
}

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const Key& k : keys()) {
    if (key == k.name) {
      k.set(cfg, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

std::string resolved_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : resolved_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.classes = 4;
  c.train_size = 2000;
  c.trajectories_per_class = 50;
  c.trials = 3;
  c.radar_counts = {1, 4, 16};
  c.snr_db = {0.0};
  c.models = {ModelKind::LogReg};
  c.out_dir = "results-desk";
  return c;
}

}  // namespace atr
