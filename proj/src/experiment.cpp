#include "atr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "atr/dataset.hpp"
#include "atr/error.hpp"
#include "io_util.hpp"

namespace atr {

GridLibrary load_or_synthesize(const ExperimentConfig& cfg) {
  if (!cfg.grid_file.empty()) return load_library(std::filesystem::path(cfg.grid_file));
  return synth_library(cfg.grid_seed, cfg.classes, cfg.synth);
}

MetricsRow score_condition(const std::vector<std::vector<std::size_t>>& decisions,
                           const std::vector<int>& truth) {
  if (decisions.empty() || decisions.size() != truth.size()) {
    throw ShapeError("decisions and truth labels must be non-empty and aligned");
  }
  const std::size_t steps = decisions.front().size();
  MetricsRow row;
  row.trajectories = decisions.size();
  row.accuracy.assign(steps, 0.0);
  double ttc_sum = 0.0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const auto& d = decisions[i];
    if (d.size() != steps) throw ShapeError("trajectories differ in length");
    const auto y = static_cast<std::size_t>(truth[i]);
    std::size_t first_stable = steps + 1;  // 1-based step
    for (std::size_t t = steps; t-- > 0;) {
      if (d[t] != y) break;
      first_stable = t + 1;
    }
    ttc_sum += static_cast<double>(first_stable);
    for (std::size_t t = 0; t < steps; ++t) row.accuracy[t] += d[t] == y ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(decisions.size());
  for (double& a : row.accuracy) a /= n;
  row.final_accuracy = row.accuracy.empty() ? 0.0 : row.accuracy.back();
  row.mean_time_to_correct = ttc_sum / n;
  return row;
}

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

auto row_key(const MetricsRow& r) {
  return std::make_tuple(r.model, static_cast<int>(r.rule), r.radars, r.snr_db, r.jitter_deg,
                         r.trial);
}

struct WorkUnit {
  double snr_db;
  double jitter_deg;
  std::size_t trial;
};

/// Trains each configured model for one (snr, jitter, trial) and evaluates it on
/// every radar count and fusion rule.
void run_unit(const ExperimentConfig& cfg, const GridLibrary& lib, const WorkUnit& u,
              std::vector<MetricsRow>& rows, std::vector<std::string>& failures) {
  const std::uint64_t train_trial = cfg.retrain == RetrainMode::PerTrial ? u.trial : 0;
  NoiseConfig train_noise;
  train_noise.snr_db = cfg.train_snr_db.value_or(u.snr_db);
  train_noise.jitter_halfwidth_az_deg = u.jitter_deg;
  train_noise.jitter_halfwidth_el_deg = u.jitter_deg;

  Rng data_rng = make_rng(cfg.base_seed, {0x7a1, train_trial, bits(train_noise.snr_db), bits(u.jitter_deg)});
  const LabeledDataset train = generate_train_dataset(lib, cfg.train_size, train_noise, data_rng);

  std::vector<std::pair<ModelKind, ClassifierModel>> models;
  for (ModelKind kind : cfg.models) {
    try {
      const std::uint64_t seed =
          derive_seed(cfg.base_seed, {0x30de1, train_trial, static_cast<std::uint64_t>(kind),
                                      bits(train_noise.snr_db), bits(u.jitter_deg)});
      if (kind == ModelKind::LogReg) {
        LogRegHyper h = cfg.logreg;
        h.seed = seed;
        h.use_angles = cfg.use_angles;
        models.emplace_back(kind, train_logreg(train, h));
      } else {
        MlpHyper h = cfg.mlp;
        h.seed = seed;
        h.use_angles = cfg.use_angles;
        models.emplace_back(kind, train_mlp(train, h));
      }
    } catch (const Error& e) {
      failures.push_back("model=" + to_string(kind) + " snr_db=" + io::format_double(u.snr_db) +
                         " jitter_deg=" + io::format_double(u.jitter_deg) +
                         " trial=" + std::to_string(u.trial) + ": " + e.what());
    }
  }

  for (std::size_t j : cfg.radar_counts) {
    TestSetConfig tc;
    tc.kinematics = cfg.kinematics;
    tc.radars = make_radar_grid(j, cfg.radar_half_width_m);
    tc.noise.snr_db = u.snr_db;
    tc.noise.jitter_halfwidth_az_deg = u.jitter_deg;
    tc.noise.jitter_halfwidth_el_deg = u.jitter_deg;
    tc.trajectories_per_class = cfg.trajectories_per_class;
    // Same flights for every radar count, SNR and jitter within a trial.
    tc.kinematics_seed = derive_seed(cfg.base_seed, {0x4b1, u.trial});
    tc.noise_seed = derive_seed(cfg.base_seed, {0x9015e, u.trial, j, bits(u.snr_db), bits(u.jitter_deg)});
    const std::vector<TrajectoryRecord> records = generate_test_dataset(lib, tc);
    std::vector<int> truth;
    for (const auto& r : records) truth.push_back(r.class_id);

    for (const auto& [kind, model] : models) {
      std::vector<std::vector<std::vector<ClassProbVector>>> preds(records.size());
      for (std::size_t i = 0; i < records.size(); ++i) {
        preds[i].resize(records[i].steps());
        for (std::size_t t = 0; t < records[i].steps(); ++t) {
          for (const Observation& o : records[i].observations[t]) {
            preds[i][t].push_back(model.predict_proba(o));
          }
        }
      }
      for (FusionKind rk : cfg.fusion_rules) {
        FusionRule rule;
        rule.kind = rk;
        rule.epsilon = cfg.hard_epsilon;
        try {
          std::vector<std::vector<std::size_t>> decisions(records.size());
          for (std::size_t i = 0; i < records.size(); ++i) {
            Rng rng = make_rng(cfg.base_seed, {0xf05e, u.trial, j, bits(u.snr_db),
                                               bits(u.jitter_deg), static_cast<std::uint64_t>(rk), i});
            for (const PosteriorState& s : classify_predictions(preds[i], rule, rng)) {
              decisions[i].push_back(s.decision());
            }
          }
          MetricsRow row = score_condition(decisions, truth);
          row.model = to_string(kind);
          row.rule = rk;
          row.radars = j;
          row.snr_db = u.snr_db;
          row.jitter_deg = u.jitter_deg;
          row.trial = u.trial;
          rows.push_back(std::move(row));
        } catch (const Error& e) {
          failures.push_back("model=" + to_string(kind) + " rule=" + to_string(rk) +
                             " radars=" + std::to_string(j) + " trial=" + std::to_string(u.trial) +
                             ": " + e.what());
        }
      }
    }
  }
}

}  // namespace

MetricsTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridLibrary lib = load_or_synthesize(cfg);
  std::vector<WorkUnit> units;
  for (double snr : cfg.snr_db)
    for (double jit : cfg.jitter_deg)
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) units.push_back({snr, jit, trial});

  MetricsTable table;
  table.config_hash = config_hash(cfg);
  table.steps = cfg.kinematics.steps;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      std::vector<MetricsRow> rows;
      std::vector<std::string> failures;
      try {
        run_unit(cfg, lib, units[i], rows, failures);
      } catch (const Error& e) {
        failures.push_back("snr_db=" + io::format_double(units[i].snr_db) +
                           " jitter_deg=" + io::format_double(units[i].jitter_deg) +
                           " trial=" + std::to_string(units[i].trial) + ": " + e.what());
      }
      std::lock_guard lock(mu);
      for (auto& r : rows) table.rows.push_back(std::move(r));
      for (auto& f : failures) {
        std::cerr << "condition failed: " << f << "\n";
        table.failures.push_back(std::move(f));
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.workers, units.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const MetricsRow& a, const MetricsRow& b) { return row_key(a) < row_key(b); });
  std::sort(table.failures.begin(), table.failures.end());
  return table;
}

// ---------------------------------------------------------------------------
// metrics.csv

namespace {
constexpr const char* kMetricsTag = "# atr-metrics v1";
}

void write_metrics_csv(const MetricsTable& table, std::ostream& out) {
  out << kMetricsTag << " config_hash=" << table.config_hash << " steps=" << table.steps << "\n";
  out << "model,rule,radars,snr_db,jitter_deg,trial,trajectories,final_accuracy,"
         "mean_time_to_correct";
  for (std::size_t t = 1; t <= table.steps; ++t) out << ",acc_t" << t;
  out << "\n";
  for (const MetricsRow& r : table.rows) {
    if (r.accuracy.size() != table.steps) throw ShapeError("metrics row length mismatch");
    out << r.model << ',' << to_string(r.rule) << ',' << r.radars << ','
        << io::format_double(r.snr_db) << ',' << io::format_double(r.jitter_deg) << ',' << r.trial
        << ',' << r.trajectories << ',' << io::format_double(r.final_accuracy) << ','
        << io::format_double(r.mean_time_to_correct);
    for (double a : r.accuracy) out << ',' << io::format_double(a);
    out << "\n";
  }
}

MetricsTable read_metrics_csv(std::istream& in) {
  MetricsTable table;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind(kMetricsTag, 0) != 0) {
    throw FormatError("missing metrics header tag", line_no, 0);
  }
  {
    std::istringstream hs(line.substr(std::string(kMetricsTag).size()));
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("config_hash=", 0) == 0) table.config_hash = tok.substr(12);
      else if (tok.rfind("steps=", 0) == 0) table.steps = std::stoul(tok.substr(6));
    }
  }
  if (!std::getline(in, line)) throw FormatError("missing metrics column header", 2, 0);
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9 + table.steps) throw FormatError("wrong column count", line_no, 0);
    auto num = [&](const std::string& s) {
      double v = 0.0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("invalid number '" + s + "'", line_no, 0);
      }
      return v;
    };
    MetricsRow r;
    r.model = f[0];
    try {
      r.rule = parse_fusion_kind(f[1]);
    } catch (const ConfigError&) {
      throw FormatError("unknown fusion rule '" + f[1] + "'", line_no, 0);
    }
    r.radars = static_cast<std::size_t>(num(f[2]));
    r.snr_db = num(f[3]);
    r.jitter_deg = num(f[4]);
    r.trial = static_cast<std::size_t>(num(f[5]));
    r.trajectories = static_cast<std::size_t>(num(f[6]));
    r.final_accuracy = num(f[7]);
    r.mean_time_to_correct = num(f[8]);
    for (std::size_t t = 0; t < table.steps; ++t) r.accuracy.push_back(num(f[9 + t]));
    table.rows.push_back(std::move(r));
  }
  return table;
}

// ---------------------------------------------------------------------------
// plot data

std::string to_string(FigureId id) {
  switch (id) {
    case FigureId::Fig5: return "fig5";
    case FigureId::Fig6: return "fig6";
    case FigureId::Fig7: return "fig7";
    case FigureId::Fig8: return "fig8";
  }
  return "fig?";
}

FigureId parse_figure_id(const std::string& name) {
  for (FigureId f : {FigureId::Fig5, FigureId::Fig6, FigureId::Fig7, FigureId::Fig8}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown figure '" + name + "' (expected fig5, fig6, fig7 or fig8)");
}

namespace {

/// A key cell: text columns sort lexically, numeric columns numerically.
struct Cell {
  std::string text;
  double num = 0.0;
  bool numeric = false;
  bool operator<(const Cell& o) const {
    return numeric && o.numeric ? num < o.num : text < o.text;
  }
};

Cell cell(const std::string& s) { return {s, 0.0, false}; }
Cell cell(double v) { return {io::format_double(v), v, true}; }
Cell cell(std::size_t v) { return cell(static_cast<double>(v)); }

/// Groups values by key (ordered), then reduces each group to mean and CI.
class Aggregator {
 public:
  using Key = std::vector<Cell>;
  void add(Key key, double v) { groups_[std::move(key)].push_back(v); }
  bool empty() const { return groups_.empty(); }

  PlotTable finish(std::vector<std::string> columns) const {
    PlotTable p;
    p.key_columns = std::move(columns);
    for (const auto& [key, vals] : groups_) {
      const double n = static_cast<double>(vals.size());
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      const double sd = vals.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      const double half = 1.96 * sd / std::sqrt(n);
      std::vector<std::string> texts;
      for (const Cell& c : key) texts.push_back(c.text);
      p.keys.push_back(std::move(texts));
      p.mean.push_back(mean);
      p.ci_low.push_back(mean - half);
      p.ci_high.push_back(mean + half);
    }
    return p;
  }

 private:
  std::map<Key, std::vector<double>> groups_;
};

}  // namespace

PlotTable make_plot_data(const MetricsTable& table, FigureId figure) {
  Aggregator agg;
  const std::string fig = to_string(figure);
  std::size_t max_j = 0;
  for (const auto& r : table.rows) max_j = std::max(max_j, r.radars);
  switch (figure) {
    case FigureId::Fig5: {
      // accuracy over time per (model, SNR, J), OBF
      for (const auto& r : table.rows) {
        if (r.rule != FusionKind::Obf) continue;
        for (std::size_t t = 0; t < r.accuracy.size(); ++t) {
          agg.add({cell(r.model), cell(r.snr_db), cell(r.jitter_deg), cell(r.radars),
                   cell(t + 1)},
                  r.accuracy[t]);
        }
      }
      if (agg.empty()) throw MissingDataError(fig + ": no metrics for condition rule=obf");
      return agg.finish({"model", "snr_db", "jitter_deg", "radars", "t"});
    }
    case FigureId::Fig6: {
      // final accuracy per fusion rule at the largest J, plus the single radar
      for (const auto& r : table.rows) {
        if (r.radars != max_j && r.radars != 1) continue;
        agg.add({cell(r.model), cell(r.jitter_deg), cell(r.snr_db), cell(to_string(r.rule)),
                 cell(r.radars)},
                r.final_accuracy);
      }
      if (agg.empty()) throw MissingDataError(fig + ": no metrics rows");
      return agg.finish({"model", "jitter_deg", "snr_db", "rule", "radars"});
    }
    case FigureId::Fig7: {
      // accuracy over time per (model, SNR, rule) at the largest J and J = 1
      for (const auto& r : table.rows) {
        if (r.radars != max_j && r.radars != 1) continue;
        for (std::size_t t = 0; t < r.accuracy.size(); ++t) {
          agg.add({cell(r.model), cell(r.snr_db), cell(r.jitter_deg), cell(to_string(r.rule)),
                   cell(r.radars), cell(t + 1)},
                  r.accuracy[t]);
        }
      }
      if (agg.empty()) throw MissingDataError(fig + ": no metrics rows");
      return agg.finish({"model", "snr_db", "jitter_deg", "rule", "radars", "t"});
    }
    case FigureId::Fig8: {
      // final accuracy vs angle-jitter standard deviation (a / sqrt(3)) at the largest J
      std::size_t jitters = 0;
      std::map<double, int> seen;
      for (const auto& r : table.rows) {
        if (r.radars != max_j) continue;
        seen[r.jitter_deg] = 1;
        agg.add({cell(r.model), cell(r.snr_db), cell(to_string(r.rule)), cell(r.radars),
                 cell(r.jitter_deg / std::sqrt(3.0))},
                r.final_accuracy);
      }
      jitters = seen.size();
      if (agg.empty()) throw MissingDataError(fig + ": no metrics rows");
      if (jitters < 2) {
        throw MissingDataError(fig + ": needs at least two jitter_deg values, metrics have " +
                               std::to_string(jitters));
      }
      return agg.finish({"model", "snr_db", "rule", "radars", "jitter_std_deg"});
    }
  }
  throw MissingDataError("unknown figure");
}

void write_plot_csv(const PlotTable& plot, std::ostream& out) {
  for (const auto& c : plot.key_columns) out << c << ',';
  out << "mean,ci_low,ci_high\n";
  for (std::size_t i = 0; i < plot.keys.size(); ++i) {
    for (std::size_t c = 0; c < plot.key_columns.size(); ++c) {
      out << plot.keys[i][c] << ',';
    }
    out << io::format_double(plot.mean[i]) << ',' << io::format_double(plot.ci_low[i]) << ','
        << io::format_double(plot.ci_high[i]) << "\n";
  }
}

void write_outputs(const ExperimentConfig& cfg, const MetricsTable& table) {
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.csv", std::ios::binary);
    if (!out) throw InputError("cannot write metrics.csv in '" + dir.string() + "'");
    write_metrics_csv(table, out);
  }
  {
    std::ofstream out(dir / "config.lock", std::ios::binary);
    out << "# resolved configuration, config_hash=" << table.config_hash << "\n"
        << resolved_config(cfg);
  }
  for (FigureId f : {FigureId::Fig5, FigureId::Fig6, FigureId::Fig7, FigureId::Fig8}) {
    try {
      const PlotTable p = make_plot_data(table, f);
      std::ofstream out(dir / (to_string(f) + ".csv"), std::ios::binary);
      write_plot_csv(p, out);
    } catch (const MissingDataError& e) {
      std::cerr << "skipping " << to_string(f) << ": " << e.what() << "\n";
    }
  }
}

}  // namespace atr
