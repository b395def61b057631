// atr: command-line front end for the multistatic classification simulator.
//
//   atr gen-grid   synthesize (or re-save) the signature library
//   atr gen-data   dump a training set and a trajectory test set as CSV
//   atr train      train the configured models and save them
//   atr run        full Monte Carlo sweep -> metrics.csv, figN.csv, config.lock
//   atr plot-data  rebuild figN.csv from an existing metrics.csv

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "atr/dataset.hpp"
#include "atr/error.hpp"
#include "atr/experiment.hpp"
#include "atr/rng.hpp"
#include "atr/simd/kernels.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string preset = "full";
  std::string config_file;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 0;
  bool no_angles = false;
};

atr::ExperimentConfig resolve(const GlobalOptions& g, const CLI::App& app) {
  atr::ExperimentConfig cfg;
  if (g.preset == "desk") {
    cfg = atr::desk_config();
  } else if (g.preset != "full") {
    throw atr::ConfigError("unknown preset '" + g.preset + "' (expected desk or full)");
  }
  if (!g.config_file.empty()) atr::apply_config_file(cfg, g.config_file);
  for (const std::string& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw atr::ConfigError("--set expects key=value, got '" + kv + "'");
    atr::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  // dedicated flags win over the file and --set
  if (app.count("--seed") > 0) cfg.base_seed = g.seed;
  if (app.count("--out") > 0) cfg.out_dir = g.out;
  if (app.count("--workers") > 0) cfg.workers = g.workers;
  if (g.no_angles) cfg.use_angles = false;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw atr::InputError("cannot write " + path.string());
  return out;
}

atr::NoiseConfig first_noise(const atr::ExperimentConfig& cfg) {
  atr::NoiseConfig n;
  n.snr_db = cfg.train_snr_db.value_or(cfg.snr_db.front());
  n.jitter_halfwidth_az_deg = cfg.jitter_deg.front();
  n.jitter_halfwidth_el_deg = cfg.jitter_deg.front();
  return n;
}

void cmd_gen_grid(const atr::ExperimentConfig& cfg) {
  const atr::GridLibrary lib = atr::load_or_synthesize(cfg);
  const fs::path path = fs::path(cfg.out_dir) / "grid.atrg";
  fs::create_directories(cfg.out_dir);
  atr::save_library(lib, path);
  std::cout << "wrote " << path.string() << " (" << lib.num_classes() << " classes, "
            << lib.num_freqs() << " frequencies)\n";
}

void cmd_gen_data(const atr::ExperimentConfig& cfg) {
  const atr::GridLibrary lib = atr::load_or_synthesize(cfg);
  const atr::NoiseConfig noise = first_noise(cfg);
  atr::Rng rng = atr::make_rng(cfg.base_seed, {0x7a1});
  const atr::LabeledDataset train = atr::generate_train_dataset(lib, cfg.train_size, noise, rng);
  {
    auto out = open_out(fs::path(cfg.out_dir) / "train.csv");
    atr::write_train_csv(train, out);
  }
  atr::TestSetConfig tc;
  tc.kinematics = cfg.kinematics;
  tc.radars = atr::make_radar_grid(cfg.radar_counts.front(), cfg.radar_half_width_m);
  tc.noise = noise;
  tc.noise.snr_db = cfg.snr_db.front();
  tc.trajectories_per_class = cfg.trajectories_per_class;
  tc.kinematics_seed = atr::derive_seed(cfg.base_seed, {0x4b1});
  tc.noise_seed = atr::derive_seed(cfg.base_seed, {0x9015e});
  const auto records = atr::generate_test_dataset(lib, tc);
  auto out = open_out(fs::path(cfg.out_dir) / "test.csv");
  atr::write_test_csv(records, out);
  std::cout << "wrote " << train.size() << " training samples and " << records.size()
            << " trajectories (J = " << cfg.radar_counts.front() << ") to " << cfg.out_dir
            << "\n";
}

void cmd_train(const atr::ExperimentConfig& cfg) {
  const atr::GridLibrary lib = atr::load_or_synthesize(cfg);
  atr::Rng rng = atr::make_rng(cfg.base_seed, {0x7a1});
  const atr::LabeledDataset train =
      atr::generate_train_dataset(lib, cfg.train_size, first_noise(cfg), rng);
  for (atr::ModelKind kind : cfg.models) {
    atr::ClassifierModel model;
    std::vector<double> losses;
    if (kind == atr::ModelKind::LogReg) {
      atr::LogRegHyper h = cfg.logreg;
      h.use_angles = cfg.use_angles;
      h.seed = atr::derive_seed(cfg.base_seed, {0x10a});
      model = atr::train_logreg(train, h, &losses);
    } else {
      atr::MlpHyper h = cfg.mlp;
      h.use_angles = cfg.use_angles;
      h.seed = atr::derive_seed(cfg.base_seed, {0x31b});
      model = atr::train_mlp(train, h, &losses);
    }
    const fs::path path = fs::path(cfg.out_dir) / (atr::to_string(kind) + ".model");
    fs::create_directories(cfg.out_dir);
    atr::save_model(model, path);
    std::cout << "wrote " << path.string() << " (final loss "
              << (losses.empty() ? 0.0 : losses.back()) << ")\n";
  }
}

void cmd_run(const atr::ExperimentConfig& cfg) {
  std::clog << "simd kernels: " << atr::simd::name(atr::simd::active().level) << "\n";
  const atr::MetricsTable table = atr::run_experiment(cfg);
  atr::write_outputs(cfg, table);
  for (const std::string& f : table.failures) std::clog << "condition failed: " << f << "\n";
  std::cout << "wrote " << table.rows.size() << " metric rows to " << cfg.out_dir << "\n";
}

void cmd_plot_data(const atr::ExperimentConfig& cfg, const std::string& metrics_path,
                   const std::vector<std::string>& figures) {
  const fs::path in_path =
      metrics_path.empty() ? fs::path(cfg.out_dir) / "metrics.csv" : fs::path(metrics_path);
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw atr::MissingDataError("cannot open " + in_path.string());
  const atr::MetricsTable table = atr::read_metrics_csv(in);
  std::vector<std::string> names = figures;
  if (names.empty()) names = {"fig5", "fig6", "fig7", "fig8"};
  for (const std::string& name : names) {
    const atr::FigureId id = atr::parse_figure_id(name);
    const atr::PlotTable plot = atr::make_plot_data(table, id);
    auto out = open_out(fs::path(cfg.out_dir) / (atr::to_string(id) + ".csv"));
    atr::write_plot_csv(plot, out);
    std::cout << "wrote " << atr::to_string(id) << ".csv (" << plot.mean.size() << " rows)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multistatic radar target classification simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--preset", g.preset, "Base configuration: full (default) or desk");
  app.add_option("--config", g.config_file, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override one config key (key=value); repeatable");
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--workers", g.workers, "Worker threads for the sweep");
  app.add_flag("--no-angles", g.no_angles, "Drop azimuth and elevation from the features");

  auto* gen_grid = app.add_subcommand("gen-grid", "Write the signature library to <out>/grid.atrg");
  auto* gen_data = app.add_subcommand("gen-data", "Write <out>/train.csv and <out>/test.csv");
  auto* train = app.add_subcommand("train", "Train the configured models into <out>/<model>.model");
  auto* run = app.add_subcommand("run", "Run the Monte Carlo sweep");
  auto* plot = app.add_subcommand("plot-data", "Rebuild figure CSVs from a metrics file");
  std::string metrics_path;
  std::vector<std::string> figures;
  plot->add_option("--metrics", metrics_path, "metrics.csv to read (default <out>/metrics.csv)");
  plot->add_option("--figure", figures, "fig5, fig6, fig7 or fig8; repeatable (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : atr::exit_code(atr::ErrorKind::Config);
  }

  try {
    const atr::ExperimentConfig cfg = resolve(g, app);
    if (gen_grid->parsed()) cmd_gen_grid(cfg);
    else if (gen_data->parsed()) cmd_gen_data(cfg);
    else if (train->parsed()) cmd_train(cfg);
    else if (run->parsed()) cmd_run(cfg);
    else if (plot->parsed()) cmd_plot_data(cfg, metrics_path, figures);
  } catch (const atr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return atr::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return atr::exit_code(atr::ErrorKind::Data);
  }
  return 0;
}
