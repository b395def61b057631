#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <vector>

#include "atr/error.hpp"
#include "atr/signature_store.hpp"

using namespace atr;

namespace {

// Grid whose value is an arbitrary non-separable function of the node indices,
// so a wrong axis order or stride shows up immediately.
RcsGrid indexed_grid(int class_id = 0) {
  const std::vector<double> freqs{26.0, 27.0, 28.0};
  const UniformAxis az{0.0, 10.0, 19};
  const UniformAxis el{-20.0, 5.0, 9};
  std::vector<double> v(freqs.size() * az.count * el.count);
  for (std::size_t f = 0; f < freqs.size(); ++f)
    for (std::size_t a = 0; a < az.count; ++a)
      for (std::size_t e = 0; e < el.count; ++e)
        v[(f * az.count + a) * el.count + e] =
            std::sin(0.3 * a + 0.7 * e + 1.1 * f) + 0.01 * a * e - 0.5 * f + class_id;
  return RcsGrid(class_id, freqs, az, el, v);
}

// Independent bilinear reference straight from the definition.
double bilinear_oracle(const RcsGrid& g, std::size_t f, double az, double el) {
  az = std::fmod(az, 360.0);
  if (az < 0) az += 360.0;
  if (az > 180.0) az -= 180.0;
  const auto& A = g.azimuth();
  const auto& E = g.elevation();
  el = std::min(std::max(el, E.start), E.back());
  auto cell = [](const UniformAxis& ax, double x, std::size_t& i0, double& t) {
    double p = (x - ax.start) / ax.step;
    i0 = static_cast<std::size_t>(std::floor(p));
    if (i0 >= ax.count - 1) i0 = ax.count - 2;
    t = p - static_cast<double>(i0);
  };
  std::size_t a0, e0;
  double ta, te;
  cell(A, az, a0, ta);
  cell(E, el, e0, te);
  return (1 - ta) * (1 - te) * g.value(f, a0, e0) + (1 - ta) * te * g.value(f, a0, e0 + 1) +
         ta * (1 - te) * g.value(f, a0 + 1, e0) + ta * te * g.value(f, a0 + 1, e0 + 1);
}

void put_f64(std::string& s, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

}  // namespace

TEST(FoldAzimuth, Rules) {
  EXPECT_DOUBLE_EQ(fold_azimuth(0.0), 0.0);
  EXPECT_DOUBLE_EQ(fold_azimuth(180.0), 180.0);
  EXPECT_DOUBLE_EQ(fold_azimuth(270.0), 90.0);
  EXPECT_DOUBLE_EQ(fold_azimuth(-90.0), 90.0);
  EXPECT_DOUBLE_EQ(fold_azimuth(360.0), 0.0);
  EXPECT_DOUBLE_EQ(fold_azimuth(725.0), 5.0);
  EXPECT_DOUBLE_EQ(fold_azimuth(-1e-300), 0.0);
}

// Property: folding lands in [0, 180] and is invariant to whole turns and to
// the half-turn symmetry.
TEST(FoldAzimuth, PropertyRangeAndSymmetry) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  std::uniform_int_distribution<int> turns(-4, 4);
  for (int i = 0; i < 20000; ++i) {
    const double a = u(rng);
    const double f = fold_azimuth(a);
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 180.0);
    ASSERT_NEAR(fold_azimuth(a + 360.0 * turns(rng)), f, 1e-9);
    const double g = fold_azimuth(a + 180.0);
    // half-turn maps to the same fold except at the 0/180 seam
    if (f > 1e-6 && f < 180.0 - 1e-6) ASSERT_NEAR(g, f, 1e-9);
  }
}

TEST(Lookup, NodeExact) {
  const RcsGrid g = indexed_grid();
  // phi = 30, theta = 10 is node (3, 6)
  for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(lookup(g, f, 30.0, 10.0), g.value(f, 3, 6));
}

// Property: every node is reproduced exactly.
TEST(Lookup, PropertyNodeExactEverywhere) {
  const RcsGrid g = indexed_grid(2);
  for (std::size_t f = 0; f < g.num_freqs(); ++f)
    for (std::size_t a = 0; a < g.azimuth().count; ++a)
      for (std::size_t e = 0; e < g.elevation().count; ++e)
        ASSERT_EQ(lookup(g, f, g.azimuth().at(a), g.elevation().at(e)), g.value(f, a, e));
}

TEST(Lookup, CellCenterOfHandGrid) {
  // corners: (az0, el0)=0, (az0, el1)=2, (az1, el0)=4, (az1, el1)=6
  const std::vector<double> v{0.0, 2.0, 4.0, 6.0};
  const RcsGrid g(0, {30.0}, UniformAxis{0.0, 180.0, 2}, UniformAxis{-10.0, 20.0, 2}, v);
  EXPECT_DOUBLE_EQ(lookup(g, 0, 90.0, 0.0), 3.0);
}

TEST(Lookup, HalfTurnSymmetry) {
  const RcsGrid g = indexed_grid();
  for (double el = -30.0; el <= 30.0; el += 3.7)
    for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(lookup(g, f, 270.0, el), lookup(g, f, 90.0, el));
}

TEST(Lookup, ElevationClamped) {
  const RcsGrid g = indexed_grid();
  EXPECT_EQ(lookup(g, 1, 45.0, -500.0), lookup(g, 1, 45.0, -20.0));
  EXPECT_EQ(lookup(g, 1, 45.0, 500.0), lookup(g, 1, 45.0, 20.0));
}

TEST(Lookup, FrequencyIndexChecked) {
  const RcsGrid g = indexed_grid();
  EXPECT_THROW(lookup(g, 3, 0.0, 0.0), RangeError);
}

// Property: random queries match the independent oracle, stay inside the cell's
// corner range, and lookup_all agrees with per-frequency lookups.
TEST(Lookup, PropertyMatchesOracleAndBounded) {
  const RcsGrid g = indexed_grid(1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> az(-720.0, 720.0), el(-40.0, 40.0);
  std::vector<double> all(g.num_freqs());
  for (int i = 0; i < 5000; ++i) {
    const double a = az(rng), e = el(rng);
    lookup_all(g, a, e, all);
    for (std::size_t f = 0; f < g.num_freqs(); ++f) {
      const double v = lookup(g, f, a, e);
      ASSERT_NEAR(v, bilinear_oracle(g, f, a, e), 1e-12);
      ASSERT_NEAR(all[f], v, 1e-12);
    }
  }
}

TEST(Lookup, ContinuityAcrossSmallSteps) {
  const RcsGrid g = indexed_grid();
  // largest per-degree slope of the fixture is well below 1 dB/deg
  for (double a = 0.0; a < 180.0; a += 0.731) {
    for (double e = -19.0; e < 19.0; e += 1.37) {
      EXPECT_LT(std::abs(lookup(g, 0, a + 0.001, e) - lookup(g, 0, a, e)), 1e-3);
      EXPECT_LT(std::abs(lookup(g, 0, a, e + 0.001) - lookup(g, 0, a, e)), 1e-3);
    }
  }
}

TEST(RcsGrid, ValidatesShape) {
  EXPECT_THROW(RcsGrid(0, {1.0}, UniformAxis{0.0, 180.0, 2}, UniformAxis{0.0, 1.0, 2},
                       std::vector<double>(3)),
               ShapeError);
  EXPECT_THROW(RcsGrid(0, {1.0}, UniformAxis{0.0, 90.0, 2}, UniformAxis{0.0, 1.0, 2},
                       std::vector<double>(4)),
               ShapeError);
  EXPECT_THROW(RcsGrid(0, {2.0, 1.0}, UniformAxis{0.0, 180.0, 2}, UniformAxis{0.0, 1.0, 2},
                       std::vector<double>(8)),
               ShapeError);
}

TEST(RcsGrid, FreqMajorRoundTrip) {
  const RcsGrid g = indexed_grid();
  const auto v = g.values_freq_major();
  const RcsGrid h(0, g.frequencies_ghz(), g.azimuth(), g.elevation(), v);
  EXPECT_EQ(g, h);
}

TEST(GridFile, HandWrittenMinimalFile) {
  std::string s =
      "ATR-RCS-GRID\nversion: 1\nclasses: 2\nclass_names: alpha beta\nfreqs_ghz: 30\n"
      "azimuth: 0 180 2\nelevation: -5 10 2\ndata: f64le\n";
  // class-major, then frequency, azimuth, elevation
  for (double v : {1.0, 2.0, 3.0, 4.0, -1.0, -2.0, -3.0, -4.0}) put_f64(s, v);
  std::istringstream in(s);
  const GridLibrary lib = load_library(in);
  ASSERT_EQ(lib.num_classes(), 2u);
  EXPECT_EQ(lib.class_names(), (std::vector<std::string>{"alpha", "beta"}));
  EXPECT_EQ(lib.grid(0).value(0, 0, 1), 2.0);
  EXPECT_EQ(lib.grid(0).value(0, 1, 0), 3.0);
  EXPECT_EQ(lib.grid(1).value(0, 1, 1), -4.0);
  EXPECT_DOUBLE_EQ(lookup(lib.grid(0), 0, 90.0, 0.0), 2.5);

  std::ostringstream out;
  save_library(lib, out);
  EXPECT_EQ(out.str(), s);
}

TEST(GridFile, RoundTripByteIdentical) {
  const GridLibrary lib = synth_library(3, 3);
  std::ostringstream a;
  save_library(lib, a);
  std::istringstream in(a.str());
  const GridLibrary back = load_library(in);
  EXPECT_EQ(back, lib);
  std::ostringstream b;
  save_library(back, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(GridFile, FrequencyCountMismatchIsShapeError) {
  SynthParams p;
  p.azimuth = UniformAxis{0.0, 90.0, 3};
  p.elevation = UniformAxis{-10.0, 10.0, 3};
  const GridLibrary lib = synth_library(1, 2, p);
  std::ostringstream out;
  save_library(lib, out);
  std::string s = out.str();
  // drop the last frequency from the header: payload is now too long for 14
  const std::string key = "freqs_ghz:";
  const auto pos = s.find(key);
  const auto eol = s.find('\n', pos);
  const auto last = s.rfind(' ', eol);
  s.erase(last, eol - last);
  std::istringstream in(s);
  EXPECT_THROW(load_library(in), ShapeError);
}

TEST(GridFile, TruncatedPayloadIsShapeError) {
  const GridLibrary lib = synth_library(1, 2);
  std::ostringstream out;
  save_library(lib, out);
  std::string s = out.str();
  s.resize(s.size() - 8);
  std::istringstream in(s);
  EXPECT_THROW(load_library(in), ShapeError);
}

TEST(GridFile, BadHeaderReportsLine) {
  std::istringstream in("ATR-RCS-GRID\nversion: 1\nclasses: two\n");
  try {
    load_library(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.offset(), 24u);
  }
  std::istringstream wrong_magic("NOT-A-GRID\n");
  EXPECT_THROW(load_library(wrong_magic), FormatError);
}

TEST(Synth, DeterministicAndClassDistinct) {
  const GridLibrary a = synth_library(42, 4);
  const GridLibrary b = synth_library(42, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, synth_library(43, 4));
  for (std::size_t c = 1; c < 4; ++c) EXPECT_NE(a.grid(0).values_freq_major(), a.grid(c).values_freq_major());
  EXPECT_EQ(a.class_names(), default_class_names(4));
  EXPECT_EQ(default_class_names(7).size(), 7u);
  EXPECT_THROW(synth_library(1, 1), ConfigError);
}

TEST(Synth, ValuesWithinAmplitudeBound) {
  const SynthParams p;
  const GridLibrary lib = synth_library(8, 5, p);
  for (const RcsGrid& g : lib.grids()) {
    double sum = 0.0;
    const auto v = g.values_freq_major();
    for (double x : v) {
      ASSERT_TRUE(std::isfinite(x));
      ASSERT_LE(std::abs(x - p.mean_level_dbsm), p.amplitude_bound() + 1e-12);
      sum += x;
    }
    const double mean = sum / static_cast<double>(v.size());
    EXPECT_LE(std::abs(mean - p.mean_level_dbsm), p.amplitude_bound());
  }
}

TEST(Synth, HalfTurnEdgesAgree) {
  const GridLibrary lib = synth_library(4, 2);
  const RcsGrid& g = lib.grid(1);
  const std::size_t last = g.azimuth().count - 1;
  for (std::size_t f = 0; f < g.num_freqs(); ++f)
    for (std::size_t e = 0; e < g.elevation().count; e += 7)
      EXPECT_NEAR(g.value(f, 0, e), g.value(f, last, e), 1e-9);
}
