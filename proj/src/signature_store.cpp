#include "atr/signature_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "atr/error.hpp"
#include "atr/rng.hpp"
#include "atr/simd/kernels.hpp"
#include "io_util.hpp"

namespace atr {

std::vector<double> default_frequencies_ghz() {
  std::vector<double> f(15);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 26.0 + static_cast<double>(i);
  return f;
}

std::vector<std::string> default_class_names(std::size_t k) {
  static const std::vector<std::string> kDrones{"F450", "Heli", "Hexa", "M100",
                                                "P4P",  "Walkera", "Y600"};
  if (k == kDrones.size()) return kDrones;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("class" + std::to_string(i));
  return names;
}

namespace {

void check_axis(const UniformAxis& axis, const char* what) {
  if (axis.count < 2 || !(axis.step > 0.0) || !std::isfinite(axis.start) ||
      !std::isfinite(axis.step)) {
    throw ShapeError(std::string(what) + " axis needs >= 2 points and a positive finite step");
  }
}

}  // namespace

RcsGrid::RcsGrid(int class_id, std::vector<double> frequencies_ghz, UniformAxis azimuth,
                 UniformAxis elevation, std::span<const double> values_freq_major)
    : class_id_(class_id), freqs_(std::move(frequencies_ghz)), azimuth_(azimuth),
      elevation_(elevation) {
  if (class_id < 0) throw InputError("class id must be non-negative");
  if (freqs_.empty()) throw ShapeError("grid needs at least one frequency");
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!std::isfinite(freqs_[i])) throw InputError("non-finite frequency");
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw ShapeError("frequencies must be strictly increasing");
    }
  }
  check_axis(azimuth_, "azimuth");
  check_axis(elevation_, "elevation");
  if (std::abs(azimuth_.start) > 1e-9 || std::abs(azimuth_.back() - 180.0) > 1e-9) {
    throw ShapeError("azimuth axis must span [0, 180] degrees");
  }
  const std::size_t nf = freqs_.size(), na = azimuth_.count, ne = elevation_.count;
  if (values_freq_major.size() != nf * na * ne) {
    throw ShapeError("grid holds " + std::to_string(values_freq_major.size()) +
                     " values, expected " + std::to_string(nf * na * ne));
  }
  values_.resize(values_freq_major.size());
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t e = 0; e < ne; ++e) {
        const double v = values_freq_major[(f * na + a) * ne + e];
        if (!std::isfinite(v)) throw InputError("non-finite RCS value");
        values_[(a * ne + e) * nf + f] = v;
      }
    }
  }
}

std::vector<double> RcsGrid::values_freq_major() const {
  const std::size_t nf = freqs_.size(), na = azimuth_.count, ne = elevation_.count;
  std::vector<double> out(values_.size());
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t e = 0; e < ne; ++e) out[(f * na + a) * ne + e] = value(f, a, e);
  return out;
}

GridLibrary::GridLibrary(std::vector<RcsGrid> grids, std::vector<std::string> class_names)
    : grids_(std::move(grids)), names_(std::move(class_names)) {
  if (grids_.empty()) throw ShapeError("library needs at least one grid");
  if (names_.size() != grids_.size()) {
    throw ShapeError("library has " + std::to_string(grids_.size()) + " grids but " +
                     std::to_string(names_.size()) + " class names");
  }
  for (std::size_t c = 0; c < grids_.size(); ++c) {
    const RcsGrid& g = grids_[c];
    if (g.class_id() != static_cast<int>(c)) throw ShapeError("grid class ids must be 0..K-1");
    if (g.frequencies_ghz() != grids_[0].frequencies_ghz() || g.azimuth() != grids_[0].azimuth() ||
        g.elevation() != grids_[0].elevation()) {
      throw ShapeError("all grids must share frequency, azimuth and elevation axes");
    }
  }
  for (const auto& n : names_) {
    if (n.empty() || n.find_first_of(" \t\r\n") != std::string::npos) {
      throw InputError("class names must be non-empty and contain no whitespace");
    }
  }
}

double fold_azimuth(double azimuth_deg) {
  double a = std::fmod(azimuth_deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a = 0.0;  // fmod of tiny negatives
  if (a > 180.0) a -= 180.0;
  return a;
}

namespace {

struct Cell {
  std::size_t lo;
  double t;  // fractional position in [0, 1]
};

Cell locate(const UniformAxis& axis, double x) {
  x = std::clamp(x, axis.start, axis.back());
  const double pos = (x - axis.start) / axis.step;
  auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo > axis.count - 2) lo = axis.count - 2;
  return {lo, std::clamp(pos - static_cast<double>(lo), 0.0, 1.0)};
}

struct Stencil {
  std::size_t az, el;
  double w[4];  // (az,el), (az,el+1), (az+1,el), (az+1,el+1)
};

Stencil stencil(const RcsGrid& grid, double azimuth_deg, double elevation_deg) {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg)) {
    throw InputError("lookup angles must be finite");
  }
  const Cell a = locate(grid.azimuth(), fold_azimuth(azimuth_deg));
  const Cell e = locate(grid.elevation(), elevation_deg);
  return {a.lo, e.lo,
          {(1.0 - a.t) * (1.0 - e.t), (1.0 - a.t) * e.t, a.t * (1.0 - e.t), a.t * e.t}};
}

}  // namespace

double lookup(const RcsGrid& grid, std::size_t freq_index, double azimuth_deg,
              double elevation_deg) {
  if (freq_index >= grid.num_freqs()) {
    throw RangeError("frequency index " + std::to_string(freq_index) + " out of range [0, " +
                     std::to_string(grid.num_freqs()) + ")");
  }
  const Stencil s = stencil(grid, azimuth_deg, elevation_deg);
  return s.w[0] * grid.value(freq_index, s.az, s.el) +
         s.w[1] * grid.value(freq_index, s.az, s.el + 1) +
         s.w[2] * grid.value(freq_index, s.az + 1, s.el) +
         s.w[3] * grid.value(freq_index, s.az + 1, s.el + 1);
}

void lookup_all(const RcsGrid& grid, double azimuth_deg, double elevation_deg,
                std::span<double> out) {
  if (out.size() != grid.num_freqs()) throw ShapeError("lookup_all output size mismatch");
  const Stencil s = stencil(grid, azimuth_deg, elevation_deg);
  simd::active().blend4(grid.node(s.az, s.el).data(), grid.node(s.az, s.el + 1).data(),
                        grid.node(s.az + 1, s.el).data(), grid.node(s.az + 1, s.el + 1).data(),
                        s.w, out.data(), out.size());
}

std::vector<double> lookup_all(const RcsGrid& grid, double azimuth_deg, double elevation_deg) {
  std::vector<double> out(grid.num_freqs());
  lookup_all(grid, azimuth_deg, elevation_deg, out);
  return out;
}

double SynthParams::amplitude_bound() const {
  return class_offset_db + spectral_tilt_db + spectral_ripple_db * ripple_terms +
         1.5 * angular_amplitude_db * harmonics;
}

GridLibrary synth_library(std::uint64_t seed, std::size_t k, const SynthParams& params) {
  if (k < 2) throw ConfigError("synthetic library needs k >= 2 classes");
  if (params.harmonics < 0 || params.angular_amplitude_db < 0.0 || params.class_offset_db < 0.0 ||
      params.spectral_tilt_db < 0.0 || params.spectral_ripple_db < 0.0 || params.ripple_terms < 0 ||
      !std::isfinite(params.mean_level_dbsm)) {
    throw ConfigError("invalid synthetic library parameters");
  }
  constexpr double kDeg = std::numbers::pi / 180.0;
  const auto& freqs = params.frequencies_ghz;
  const std::size_t nf = freqs.size(), na = params.azimuth.count, ne = params.elevation.count;
  if (nf == 0) throw ConfigError("synthetic library needs at least one frequency");
  const double f_mid = 0.5 * (freqs.front() + freqs.back());
  const double f_half = nf > 1 ? 0.5 * (freqs.back() - freqs.front()) : 1.0;

  struct Harmonic {
    double amp, az_order, el_order, az_phase, el_phase, freq_slope;
  };

  std::vector<RcsGrid> grids;
  for (std::size_t c = 0; c < k; ++c) {
    Rng rng = make_rng(seed, {0x51a7, c});
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> order(1, 3);
    const double offset = params.class_offset_db * sym(rng);
    const double tilt = params.spectral_tilt_db * sym(rng);
    // Ripple phases are shared across classes up to a class-dependent stagger,
    // so every pair of classes keeps a minimum spectral distance.
    std::vector<double> ripple(nf, 0.0);
    Rng shared = make_rng(seed, {0x41b});
    const double stagger = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
    for (int m = 1; m <= params.ripple_terms; ++m) {
      const double amp = params.spectral_ripple_db;
      const double psi = phase(shared) + stagger;
      for (std::size_t f = 0; f < nf; ++f) {
        const double u = (freqs[f] - f_mid) / f_half;
        ripple[f] += amp * std::cos(m * std::numbers::pi * 0.5 * (u + 1.0) + psi);
      }
    }
    std::vector<Harmonic> hs;
    for (int h = 0; h < params.harmonics; ++h) {
      Harmonic hm{};
      hm.amp = params.angular_amplitude_db * (0.5 + 0.5 * std::abs(sym(rng)));
      hm.az_order = 2.0 * order(rng);  // even orders keep phi = 0 and phi = 180 equal
      hm.el_order = order(rng);
      hm.az_phase = phase(rng);
      hm.el_phase = phase(rng);
      hm.freq_slope = 0.5 * sym(rng);
      hs.push_back(hm);
    }
    std::vector<double> values(nf * na * ne);
    for (std::size_t f = 0; f < nf; ++f) {
      const double u = (freqs[f] - f_mid) / f_half;
      for (std::size_t a = 0; a < na; ++a) {
        const double phi = params.azimuth.at(a) * kDeg;
        for (std::size_t e = 0; e < ne; ++e) {
          const double theta = params.elevation.at(e) * kDeg;
          double v = params.mean_level_dbsm + offset + tilt * u + ripple[f];
          for (const Harmonic& hm : hs) {
            v += hm.amp * (1.0 + hm.freq_slope * u) * std::cos(hm.az_order * phi + hm.az_phase) *
                 std::cos(hm.el_order * theta + hm.el_phase);
          }
          values[(f * na + a) * ne + e] = v;
        }
      }
    }
    grids.emplace_back(static_cast<int>(c), freqs, params.azimuth, params.elevation, values);
  }
  return GridLibrary(std::move(grids), default_class_names(k));
}

// ---------------------------------------------------------------------------
// Grid file I/O

namespace {
constexpr const char* kMagic = "ATR-RCS-GRID";

std::string axis_line(const char* key, const UniformAxis& a) {
  return std::string(key) + ": " + io::format_double(a.start) + " " + io::format_double(a.step) +
         " " + std::to_string(a.count) + "\n";
}
}  // namespace

void save_library(const GridLibrary& lib, std::ostream& out) {
  const RcsGrid& g0 = lib.grid(0);
  std::string header = std::string(kMagic) + "\n";
  header += "version: 1\n";
  header += "classes: " + std::to_string(lib.num_classes()) + "\n";
  header += "class_names:";
  for (const auto& n : lib.class_names()) header += " " + n;
  header += "\nfreqs_ghz:";
  for (double f : g0.frequencies_ghz()) header += " " + io::format_double(f);
  header += "\n";
  header += axis_line("azimuth", g0.azimuth());
  header += axis_line("elevation", g0.elevation());
  header += "data: f64le\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const RcsGrid& g : lib.grids()) io::write_f64le(out, g.values_freq_major());
  if (!out) throw InputError("failed writing grid library");
}

void save_library(const GridLibrary& lib, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  save_library(lib, out);
}

GridLibrary load_library(std::istream& in) {
  io::HeaderReader hr(in);
  hr.expect_exact(kMagic);
  auto version = hr.expect_key("version");
  if (version.size() != 1 || hr.to_int(version[0]) != 1) hr.fail("unsupported grid version");
  auto classes = hr.expect_key("classes");
  if (classes.size() != 1) hr.fail("classes takes one value");
  const long long k = hr.to_int(classes[0]);
  if (k < 1) hr.fail("classes must be >= 1");
  auto names = hr.expect_key("class_names");
  if (static_cast<long long>(names.size()) != k) {
    throw ShapeError("header declares " + std::to_string(k) + " classes but lists " +
                     std::to_string(names.size()) + " class names");
  }
  auto freq_tokens = hr.expect_key("freqs_ghz");
  std::vector<double> freqs;
  for (const auto& t : freq_tokens) freqs.push_back(hr.to_double(t));
  auto read_axis = [&](const char* key) {
    auto t = hr.expect_key(key);
    if (t.size() != 3) hr.fail(std::string(key) + " takes 'start step count'");
    const long long count = hr.to_int(t[2]);
    if (count < 2) hr.fail(std::string(key) + " count must be >= 2");
    return UniformAxis{hr.to_double(t[0]), hr.to_double(t[1]), static_cast<std::size_t>(count)};
  };
  const UniformAxis az = read_axis("azimuth");
  const UniformAxis el = read_axis("elevation");
  auto data = hr.expect_key("data");
  if (data.size() != 1 || data[0] != "f64le") hr.fail("payload encoding must be f64le");

  const std::size_t header_bytes = hr.offset();
  const std::string payload = hr.read_payload();
  const std::size_t per_grid = freqs.size() * az.count * el.count;
  const std::size_t expected = static_cast<std::size_t>(k) * per_grid * 8;
  if (payload.size() != expected) {
    throw ShapeError("payload has " + std::to_string(payload.size()) + " bytes at offset " +
                     std::to_string(header_bytes) + ", header implies " +
                     std::to_string(expected) + " (" + std::to_string(k) + " classes x " +
                     std::to_string(freqs.size()) + " freqs x " + std::to_string(az.count) +
                     " az x " + std::to_string(el.count) + " el)");
  }
  std::vector<RcsGrid> grids;
  std::vector<double> values(per_grid);
  for (long long c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per_grid; ++i) {
      const std::size_t off = (static_cast<std::size_t>(c) * per_grid + i) * 8;
      values[i] = io::decode_f64le(payload.data() + off);
      if (!std::isfinite(values[i])) {
        throw InputError("non-finite RCS value at byte offset " + std::to_string(header_bytes + off));
      }
    }
    grids.emplace_back(static_cast<int>(c), freqs, az, el, values);
  }
  return GridLibrary(std::move(grids), std::move(names));
}

GridLibrary load_library(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open grid file '" + path.string() + "'");
  return load_library(in);
}

}  // namespace atr
