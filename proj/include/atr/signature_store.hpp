#pragma once

// Per-class RCS signature grids over (frequency, azimuth, elevation) and the
// bilinear angle lookup used for both training and trajectory observations.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace atr {

/// Uniformly spaced axis: start, start + step, ..., start + (count - 1) * step.
struct UniformAxis {
  double start = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
  double back() const { return at(count - 1); }
  bool operator==(const UniformAxis&) const = default;
};

inline constexpr UniformAxis kDefaultAzimuthAxis{0.0, 1.0, 181};
inline constexpr UniformAxis kDefaultElevationAxis{-95.0, 1.0, 191};
std::vector<double> default_frequencies_ghz();  // 26..40 GHz, 1 GHz steps

/// RCS lookup table of one class, values in dB m^2.
///
/// Stored internally node-major ([azimuth][elevation][frequency]) so a lookup
/// blends four contiguous frequency vectors. The external/file order is
/// frequency-major ([frequency][azimuth][elevation]).
class RcsGrid {
 public:
  RcsGrid() = default;
  /// values_freq_major has shape F x |azimuth| x |elevation|.
  RcsGrid(int class_id, std::vector<double> frequencies_ghz, UniformAxis azimuth,
          UniformAxis elevation, std::span<const double> values_freq_major);

  int class_id() const { return class_id_; }
  const std::vector<double>& frequencies_ghz() const { return freqs_; }
  std::size_t num_freqs() const { return freqs_.size(); }
  const UniformAxis& azimuth() const { return azimuth_; }
  const UniformAxis& elevation() const { return elevation_; }

  double value(std::size_t freq, std::size_t az, std::size_t el) const {
    return values_[(az * elevation_.count + el) * freqs_.size() + freq];
  }
  /// F contiguous values at one angle node.
  std::span<const double> node(std::size_t az, std::size_t el) const {
    return {values_.data() + (az * elevation_.count + el) * freqs_.size(), freqs_.size()};
  }
  std::vector<double> values_freq_major() const;

  bool operator==(const RcsGrid&) const = default;

 private:
  int class_id_ = 0;
  std::vector<double> freqs_;
  UniformAxis azimuth_;
  UniformAxis elevation_;
  std::vector<double> values_;
};

/// One grid per class, all sharing the same axes. Immutable after construction.
class GridLibrary {
 public:
  GridLibrary() = default;
  GridLibrary(std::vector<RcsGrid> grids, std::vector<std::string> class_names);

  std::size_t num_classes() const { return grids_.size(); }
  std::size_t num_freqs() const { return grids_.front().num_freqs(); }
  const RcsGrid& grid(std::size_t class_id) const { return grids_.at(class_id); }
  const std::vector<RcsGrid>& grids() const { return grids_; }
  const std::vector<std::string>& class_names() const { return names_; }

  bool operator==(const GridLibrary&) const = default;

 private:
  std::vector<RcsGrid> grids_;
  std::vector<std::string> names_;
};

/// Default names for a seven-class library.
std::vector<std::string> default_class_names(std::size_t k);

/// Maps any azimuth into [0, 180]: wrap into [0, 360), then fold by the
/// front/back symmetry (phi -> phi - 180 for phi > 180).
double fold_azimuth(double azimuth_deg);

/// Bilinear RCS at one frequency. Elevation is clamped to the grid range.
double lookup(const RcsGrid& grid, std::size_t freq_index, double azimuth_deg,
              double elevation_deg);

/// Bilinear RCS at every frequency; out.size() must equal grid.num_freqs().
void lookup_all(const RcsGrid& grid, double azimuth_deg, double elevation_deg,
                std::span<double> out);
std::vector<double> lookup_all(const RcsGrid& grid, double azimuth_deg, double elevation_deg);

struct SynthParams {
  double mean_level_dbsm = -12.0;   // common level of every class
  double class_offset_db = 1.0;     // per-class level offset drawn in [-x, x]
  double spectral_tilt_db = 1.5;    // per-class linear trend across the band in [-x, x]
  double spectral_ripple_db = 0.8;  // amplitude of each spectral ripple term
  int ripple_terms = 3;
  double angular_amplitude_db = 1.0;  // amplitude scale of each angular harmonic
  int harmonics = 3;
  std::vector<double> frequencies_ghz = default_frequencies_ghz();
  UniformAxis azimuth = kDefaultAzimuthAxis;
  UniformAxis elevation = kDefaultElevationAxis;

  /// Every synthesized value lies within [mean - bound, mean + bound].
  double amplitude_bound() const;
};

/// Deterministic smooth synthetic library: per class, a level offset, a spectral
/// tilt, a low-order spectral ripple and a sum of low-order angular harmonics with class-specific coefficients.
GridLibrary synth_library(std::uint64_t seed, std::size_t k, const SynthParams& params = {});

// Grid file: text header + little-endian float64 payload (see docs/file_formats.md).
void save_library(const GridLibrary& lib, std::ostream& out);
void save_library(const GridLibrary& lib, const std::filesystem::path& path);
GridLibrary load_library(std::istream& in);
GridLibrary load_library(const std::filesystem::path& path);

}  // namespace atr
