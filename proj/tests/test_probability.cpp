#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "atr/error.hpp"
#include "atr/probability.hpp"

using namespace atr;

TEST(ClassProbVector, UniformAndArgmax) {
  const auto u = ClassProbVector::uniform(4);
  ASSERT_EQ(u.size(), 4u);
  for (double p : u.values()) EXPECT_DOUBLE_EQ(p, 0.25);
  EXPECT_EQ(u.argmax(), 0u);  // ties go to the lowest index
  EXPECT_EQ(ClassProbVector::from_probabilities({0.2, 0.4, 0.4}).argmax(), 1u);
  EXPECT_THROW(ClassProbVector::uniform(0), InputError);
}

TEST(ClassProbVector, RejectsInvalid) {
  EXPECT_THROW(ClassProbVector::from_probabilities({0.5, 0.6}), InputError);
  EXPECT_THROW(ClassProbVector::from_probabilities({1.2, -0.2}), InputError);
  EXPECT_THROW(ClassProbVector::from_probabilities({NAN, 1.0}), InputError);
  EXPECT_THROW(ClassProbVector::normalize({0.0, 0.0}), NumericalError);
  EXPECT_THROW(ClassProbVector::normalize({-1.0, 2.0}), InputError);
  EXPECT_NO_THROW(ClassProbVector::from_probabilities({0.5, 0.5 + 5e-10}));
}

TEST(ClassProbVector, FromLogWeightsIsSoftmax) {
  const std::vector<double> lw{std::log(0.36), std::log(0.16)};
  const auto p = ClassProbVector::from_log_weights(lw);
  EXPECT_NEAR(p[0], 0.36 / 0.52, 1e-15);
  EXPECT_NEAR(p[1], 0.16 / 0.52, 1e-15);
  // large offsets do not overflow
  const std::vector<double> big{1000.0, 1000.0 + std::log(3.0)};
  const auto q = ClassProbVector::from_log_weights(big);
  EXPECT_NEAR(q[0], 0.25, 1e-12);
  EXPECT_NEAR(q[1], 0.75, 1e-12);
}

TEST(ClassProbVector, FlooredKeepsMinimumMass) {
  const auto p = ClassProbVector::from_probabilities({1.0, 0.0, 0.0});
  const auto f = p.floored(1e-9);
  EXPECT_TRUE(is_valid_distribution(f.values()));
  for (double v : f.values()) EXPECT_GE(v, 1e-9 / (1.0 + 3e-9));
}

// Property: every constructor path yields a valid distribution.
TEST(ClassProbVector, PropertyRandomInputsStayValid) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> kd(1, 12);
  std::uniform_real_distribution<double> w(0.0, 10.0), lw(-700.0, 700.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = kd(rng);
    std::vector<double> weights(k), logs(k);
    for (int i = 0; i < k; ++i) {
      weights[i] = w(rng);
      logs[i] = lw(rng);
    }
    weights[0] += 1e-3;
    const auto a = ClassProbVector::normalize(weights);
    const auto b = ClassProbVector::from_log_weights(logs);
    const auto c = b.floored(1e-9);
    for (const auto* v : {&a, &b, &c}) {
      ASSERT_TRUE(is_valid_distribution(v->values()));
      ASSERT_NEAR(std::accumulate(v->values().begin(), v->values().end(), 0.0), 1.0, 1e-9);
      ASSERT_LT(v->argmax(), static_cast<std::size_t>(k));
    }
  }
}

TEST(ArgmaxLowest, TieBreaksLow) {
  const std::vector<double> v{0.1, 0.4, 0.4, 0.1};
  EXPECT_EQ(argmax_lowest(v), 1u);
  const std::vector<double> one{7.0};
  EXPECT_EQ(argmax_lowest(one), 0u);
}

TEST(IsValidDistribution, Tolerance) {
  const std::vector<double> ok{0.5, 0.5 + 9e-10};
  const std::vector<double> bad{0.5, 0.5 + 2e-9};
  const std::vector<double> neg{1.1, -0.1};
  EXPECT_TRUE(is_valid_distribution(ok));
  EXPECT_FALSE(is_valid_distribution(bad));
  EXPECT_FALSE(is_valid_distribution(neg));
  EXPECT_FALSE(is_valid_distribution(std::vector<double>{}));
}
