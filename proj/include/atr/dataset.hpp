#pragma once

// Training and trajectory test-set synthesis from a GridLibrary.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "atr/classifier.hpp"
#include "atr/fusion.hpp"
#include "atr/noise.hpp"
#include "atr/signature_store.hpp"
#include "atr/trajectory.hpp"

namespace atr {

/// One simulated trajectory seen by J radars over L steps.
struct TrajectoryRecord {
  int class_id = 0;
  ObservationGrid observations;                // [step][radar], noisy
  std::vector<std::vector<AspectSample>> truth;  // [step][radar], noise-free geometry

  std::size_t steps() const { return observations.size(); }
  std::size_t radars() const { return observations.empty() ? 0 : observations.front().size(); }
};

/// Stratified single-observation training set: n / K samples per class (the
/// first n mod K classes get one extra). Angles are uniform over the grid axes;
/// the RCS vector is the noisy lookup and the angles are jittered.
LabeledDataset generate_train_dataset(const GridLibrary& lib, std::size_t n,
                                      const NoiseConfig& noise, Rng& rng);

struct TestSetConfig {
  KinematicsConfig kinematics;
  RadarArray radars;
  NoiseConfig noise;
  std::size_t trajectories_per_class = 10;
  std::uint64_t kinematics_seed = 1;  // trajectory i uses stream (kinematics_seed, i)
  std::uint64_t noise_seed = 2;       // trajectory i uses stream (noise_seed, i)
};

/// Builds one trajectory record; the kinematics and the observation noise come
/// from separate streams so the same flight can be replayed under other radar
/// layouts or noise levels.
TrajectoryRecord simulate_record(const GridLibrary& lib, int class_id, const TestSetConfig& cfg,
                                 Rng& kinematics_rng, Rng& noise_rng);

/// K * trajectories_per_class records, class-major order.
std::vector<TrajectoryRecord> generate_test_dataset(const GridLibrary& lib,
                                                    const TestSetConfig& cfg);

// CSV dumps (docs/file_formats.md).
void write_train_csv(const LabeledDataset& data, std::ostream& out);
LabeledDataset read_train_csv(std::istream& in, std::size_t num_classes);
void write_test_csv(const std::vector<TrajectoryRecord>& records, std::ostream& out);

}  // namespace atr
