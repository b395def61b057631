#pragma once

// Seeded Monte Carlo harness: trains classifiers, simulates multistatic
// trajectories, runs every fusion rule through the recursive classifier and
// aggregates accuracy-over-time metrics and per-figure plot tables.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atr/classifier.hpp"
#include "atr/fusion.hpp"
#include "atr/signature_store.hpp"
#include "atr/trajectory.hpp"

namespace atr {

enum class RetrainMode { PerTrial, Once };

struct ExperimentConfig {
  // grid source: a grid file, or a synthetic library when grid_file is empty
  std::string grid_file;
  std::uint64_t grid_seed = 7;
  std::size_t classes = 7;
  SynthParams synth;

  std::vector<std::size_t> radar_counts{1, 4, 16, 64};
  std::vector<double> snr_db{-20.0, -10.0, 0.0, 10.0, 20.0};
  std::vector<double> jitter_deg{40.0};  // uniform half-widths, applied to azimuth and elevation
  std::vector<FusionKind> fusion_rules{FusionKind::Obf, FusionKind::Soft, FusionKind::Hard,
                                       FusionKind::Max, FusionKind::Random};
  std::vector<ModelKind> models{ModelKind::LogReg, ModelKind::Mlp};
  std::size_t trials = 10;
  std::size_t trajectories_per_class = 286;  // ~2000 test trajectories for K = 7
  std::size_t train_size = 10000;            // total, stratified over classes
  std::optional<double> train_snr_db;        // unset: train at each condition's SNR
  RetrainMode retrain = RetrainMode::PerTrial;
  bool use_angles = true;
  double hard_epsilon = 0.007;
  double radar_half_width_m = 150.0;

  KinematicsConfig kinematics;
  LogRegHyper logreg;
  MlpHyper mlp;

  std::uint64_t base_seed = 1;
  std::string out_dir = "results";
  std::size_t workers = 1;

  void validate() const;
};

/// Flat "key = value" config text; '#' starts a comment. Unknown keys are errors.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Every key with its resolved value, in a fixed order (the config.lock file).
std::string resolved_config(const ExperimentConfig& cfg);
/// FNV-1a over the resolved config, hex.
std::string config_hash(const ExperimentConfig& cfg);

/// The desk-scale preset: K = 4 synthetic classes, 2000 training samples,
/// 50 trajectories per class, 3 trials.
ExperimentConfig desk_config();

struct MetricsRow {
  std::string model;
  FusionKind rule = FusionKind::Obf;
  std::size_t radars = 0;
  double snr_db = 0.0;
  double jitter_deg = 0.0;
  std::size_t trial = 0;
  std::size_t trajectories = 0;
  std::vector<double> accuracy;  // accuracy after step t = 1..L
  double final_accuracy = 0.0;
  double mean_time_to_correct = 0.0;  // first step after which the decision stays correct; L+1 if never
};

struct MetricsTable {
  std::string config_hash;
  std::size_t steps = 0;
  std::vector<MetricsRow> rows;     // sorted by condition key
  std::vector<std::string> failures;  // diagnostics of aborted conditions
};

GridLibrary load_or_synthesize(const ExperimentConfig& cfg);

/// Scores the posterior sequences of one condition. Each element of
/// `decisions` is one trajectory's argmax sequence.
MetricsRow score_condition(const std::vector<std::vector<std::size_t>>& decisions,
                           const std::vector<int>& truth);

MetricsTable run_experiment(const ExperimentConfig& cfg);

void write_metrics_csv(const MetricsTable& table, std::ostream& out);
MetricsTable read_metrics_csv(std::istream& in);

enum class FigureId { Fig5, Fig6, Fig7, Fig8 };
std::string to_string(FigureId id);
FigureId parse_figure_id(const std::string& name);

/// Tidy plot table: key columns, then mean, ci_low, ci_high (normal 95% CI over trials).
struct PlotTable {
  std::vector<std::string> key_columns;
  std::vector<std::vector<std::string>> keys;
  std::vector<double> mean, ci_low, ci_high;
};

/// Throws MissingDataError naming the absent condition.
PlotTable make_plot_data(const MetricsTable& table, FigureId figure);
void write_plot_csv(const PlotTable& plot, std::ostream& out);

/// Writes metrics.csv, config.lock and every figure CSV the metrics support.
void write_outputs(const ExperimentConfig& cfg, const MetricsTable& table);

}  // namespace atr
