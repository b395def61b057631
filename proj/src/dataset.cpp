#include "atr/dataset.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "atr/error.hpp"
#include "io_util.hpp"

namespace atr {

LabeledDataset generate_train_dataset(const GridLibrary& lib, std::size_t n,
                                      const NoiseConfig& noise, Rng& rng) {
  const std::size_t k = lib.num_classes();
  if (n < k) throw ConfigError("training set size must be >= number of classes");
  noise.validate();
  const RcsGrid& g0 = lib.grid(0);
  std::uniform_real_distribution<double> az(g0.azimuth().start, g0.azimuth().back());
  std::uniform_real_distribution<double> el(g0.elevation().start, g0.elevation().back());

  LabeledDataset data;
  data.num_classes = k;
  data.samples.reserve(n);
  data.labels.reserve(n);
  std::vector<double> clean(lib.num_freqs());
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t count = n / k + (c < n % k ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = az(rng);
      const double e = el(rng);
      lookup_all(lib.grid(c), a, e, clean);
      Observation obs;
      obs.rcs_dbsm = noisy_signature(clean, noise, rng);
      std::tie(obs.azimuth_deg, obs.elevation_deg) = jitter_angles(a, e, noise, rng);
      data.samples.push_back(std::move(obs));
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

TrajectoryRecord simulate_record(const GridLibrary& lib, int class_id, const TestSetConfig& cfg,
                                 Rng& kinematics_rng, Rng& noise_rng) {
  const RcsGrid& grid = lib.grid(static_cast<std::size_t>(class_id));
  const std::vector<Pose> poses = simulate_trajectory(cfg.kinematics, kinematics_rng);
  TrajectoryRecord rec;
  rec.class_id = class_id;
  rec.observations.resize(poses.size());
  rec.truth.resize(poses.size());
  std::vector<double> clean(grid.num_freqs());
  for (std::size_t t = 0; t < poses.size(); ++t) {
    rec.truth[t] = aspect_angles(poses[t], cfg.radars);
    rec.observations[t].reserve(cfg.radars.size());
    for (const AspectSample& s : rec.truth[t]) {
      lookup_all(grid, s.azimuth_deg, s.elevation_deg, clean);
      Observation obs;
      obs.rcs_dbsm = noisy_signature(clean, cfg.noise, noise_rng);
      std::tie(obs.azimuth_deg, obs.elevation_deg) =
          jitter_angles(s.azimuth_deg, s.elevation_deg, cfg.noise, noise_rng);
      rec.observations[t].push_back(std::move(obs));
    }
  }
  return rec;
}

std::vector<TrajectoryRecord> generate_test_dataset(const GridLibrary& lib,
                                                    const TestSetConfig& cfg) {
  cfg.kinematics.validate();
  cfg.noise.validate();
  if (cfg.radars.size() == 0) throw ConfigError("test set needs at least one radar");
  std::vector<TrajectoryRecord> out;
  out.reserve(lib.num_classes() * cfg.trajectories_per_class);
  std::uint64_t index = 0;
  for (std::size_t c = 0; c < lib.num_classes(); ++c) {
    for (std::size_t i = 0; i < cfg.trajectories_per_class; ++i, ++index) {
      Rng kin = make_rng(cfg.kinematics_seed, {index});
      Rng noise = make_rng(cfg.noise_seed, {index});
      out.push_back(simulate_record(lib, static_cast<int>(c), cfg, kin, noise));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_train_csv(const LabeledDataset& data, std::ostream& out) {
  data.validate();
  const std::size_t f = data.samples.front().rcs_dbsm.size();
  out << "class_id,azimuth_deg,elevation_deg";
  for (std::size_t i = 0; i < f; ++i) out << ",rcs_" << i;
  out << "\n";
  for (std::size_t s = 0; s < data.size(); ++s) {
    const Observation& o = data.samples[s];
    out << data.labels[s] << ',' << io::format_double(o.azimuth_deg) << ','
        << io::format_double(o.elevation_deg);
    for (double v : o.rcs_dbsm) out << ',' << io::format_double(v);
    out << '\n';
  }
}

LabeledDataset read_train_csv(std::istream& in, std::size_t num_classes) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty training CSV", 1, 0);
  std::size_t cols = 1;
  for (char ch : line) cols += ch == ',' ? 1 : 0;
  if (cols < 4 || line.rfind("class_id,azimuth_deg,elevation_deg", 0) != 0) {
    throw FormatError("unexpected training CSV header", 1, 0);
  }
  LabeledDataset data;
  data.num_classes = num_classes;
  std::size_t line_no = 1, offset = line.size() + 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      offset += 1;
      continue;
    }
    std::vector<double> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      double v = 0.0;
      auto res = std::from_chars(line.data() + pos, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end) {
        throw FormatError("invalid number in training CSV", line_no, offset + pos);
      }
      fields.push_back(v);
      pos = end + 1;
    }
    if (fields.size() != cols) throw FormatError("wrong column count", line_no, offset);
    Observation o;
    o.azimuth_deg = fields[1];
    o.elevation_deg = fields[2];
    o.rcs_dbsm.assign(fields.begin() + 3, fields.end());
    data.labels.push_back(static_cast<int>(fields[0]));
    data.samples.push_back(std::move(o));
    offset += line.size() + 1;
  }
  data.validate();
  return data;
}

void write_test_csv(const std::vector<TrajectoryRecord>& records, std::ostream& out) {
  if (records.empty()) throw InputError("no trajectories to write");
  const std::size_t f = records.front().observations.at(0).at(0).rcs_dbsm.size();
  out << "trajectory,step,radar,class_id,azimuth_deg,elevation_deg,true_azimuth_deg,"
         "true_elevation_deg,range_m";
  for (std::size_t i = 0; i < f; ++i) out << ",rcs_" << i;
  out << "\n";
  for (std::size_t r = 0; r < records.size(); ++r) {
    const TrajectoryRecord& rec = records[r];
    for (std::size_t t = 0; t < rec.steps(); ++t) {
      for (std::size_t j = 0; j < rec.radars(); ++j) {
        const Observation& o = rec.observations[t][j];
        const AspectSample& s = rec.truth[t][j];
        out << r << ',' << (t + 1) << ',' << j << ',' << rec.class_id << ','
            << io::format_double(o.azimuth_deg) << ',' << io::format_double(o.elevation_deg) << ','
            << io::format_double(s.azimuth_deg) << ',' << io::format_double(s.elevation_deg) << ','
            << io::format_double(s.range_m);
        for (double v : o.rcs_dbsm) out << ',' << io::format_double(v);
        out << '\n';
      }
    }
  }
}

}  // namespace atr
