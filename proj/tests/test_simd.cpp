#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "atr/error.hpp"
#include "atr/simd/kernels.hpp"

using namespace atr;
using atr::simd::Level;

namespace {

std::vector<Level> available_levels() {
  std::vector<Level> out;
  for (Level l : {Level::Scalar, Level::Avx2, Level::Neon})
    if (simd::supported(l)) out.push_back(l);
  return out;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(Simd, ScalarAlwaysSupported) {
  EXPECT_TRUE(simd::supported(Level::Scalar));
  EXPECT_EQ(simd::table(Level::Scalar).level, Level::Scalar);
  EXPECT_TRUE(simd::supported(simd::active().level));
}

TEST(Simd, UnsupportedLevelThrows) {
  for (Level l : {Level::Avx2, Level::Neon}) {
    if (!simd::supported(l)) {
      EXPECT_THROW(simd::table(l), ConfigError);
    }
  }
}

// Every compiled variant agrees with the scalar reference on odd lengths and
// tails. dot may reassociate, so it gets a rounding tolerance; the elementwise
// kernels must match bitwise.
TEST(Simd, VariantsMatchScalarReference) {
  const auto& ref = simd::table(Level::Scalar);
  std::mt19937_64 rng(11);
  for (Level level : available_levels()) {
    const auto& k = simd::table(level);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 31u, 100u}) {
      const auto x = random_vec(n, rng);
      const auto y = random_vec(n, rng);

      double abs_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(x[i] * y[i]);
      EXPECT_NEAR(k.dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n),
                  1e-14 * (abs_sum + 1.0))
          << simd::name(level) << " n=" << n;

      auto ya = y, yb = y;
      k.axpy(0.37, x.data(), ya.data(), n);
      ref.axpy(0.37, x.data(), yb.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ya[i], yb[i], 1e-15 * (std::abs(yb[i]) + 1.0));

      ya = y, yb = y;
      k.add(x.data(), ya.data(), n);
      ref.add(x.data(), yb.data(), n);
      EXPECT_EQ(ya, yb);

      ya = y, yb = y;
      k.max(x.data(), ya.data(), n);
      ref.max(x.data(), yb.data(), n);
      EXPECT_EQ(ya, yb);

      const auto p0 = random_vec(n, rng), p1 = random_vec(n, rng), p2 = random_vec(n, rng),
                 p3 = random_vec(n, rng);
      const double w[4] = {0.1, 0.2, 0.3, 0.4};
      std::vector<double> oa(n), ob(n);
      k.blend4(p0.data(), p1.data(), p2.data(), p3.data(), w, oa.data(), n);
      ref.blend4(p0.data(), p1.data(), p2.data(), p3.data(), w, ob.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(oa[i], ob[i], 1e-14);
    }
  }
}

TEST(Simd, ScalarKernelsHandComputed) {
  const auto& k = simd::table(Level::Scalar);
  const double x[3] = {1.0, 2.0, 3.0};
  double y[3] = {4.0, -5.0, 6.0};
  EXPECT_DOUBLE_EQ(k.dot(x, y, 3), 4.0 - 10.0 + 18.0);
  k.axpy(2.0, x, y, 3);
  EXPECT_DOUBLE_EQ(y[0], 6.0);
  EXPECT_DOUBLE_EQ(y[1], -1.0);
  EXPECT_DOUBLE_EQ(y[2], 12.0);
  double m[3] = {0.0, 5.0, 1.0};
  k.max(x, m, 3);
  EXPECT_DOUBLE_EQ(m[0], 1.0);
  EXPECT_DOUBLE_EQ(m[1], 5.0);
  EXPECT_DOUBLE_EQ(m[2], 3.0);
  const double a[1] = {0.0}, b[1] = {2.0}, c[1] = {4.0}, d[1] = {6.0};
  const double w[4] = {0.25, 0.25, 0.25, 0.25};
  double out[1];
  k.blend4(a, b, c, d, w, out, 1);
  EXPECT_DOUBLE_EQ(out[0], 3.0);
}
