#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

#include "atr/error.hpp"
#include "atr/trajectory.hpp"

using namespace atr;

namespace {

double wrap180(double a) {
  a = std::fmod(a, 360.0);
  if (a > 180.0) a -= 360.0;
  if (a <= -180.0) a += 360.0;
  return a;
}

KinematicsConfig quiet() {
  KinematicsConfig c;
  c.yaw_noise_param = 0.0;
  c.roll_noise_param = 0.0;
  return c;
}

}  // namespace

TEST(Kinematics, DefaultsAndNoiseModes) {
  KinematicsConfig c;
  EXPECT_DOUBLE_EQ(c.velocity_mps * c.dt_s, 5.0);
  EXPECT_DOUBLE_EQ(c.yaw_noise_std_deg(), 12.0);
  EXPECT_DOUBLE_EQ(c.roll_noise_std_deg(), 9.0);
  c.noise_mode = NoiseParamMode::StdDev;
  EXPECT_DOUBLE_EQ(c.yaw_noise_std_deg(), 144.0);
  c.dt_s = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Kinematics, InitialPoseDistribution) {
  Rng rng(21);
  const KinematicsConfig cfg;
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Pose p = initial_pose(rng, cfg);
    ASSERT_GE(p.position_m.z(), 200.0);
    ASSERT_LE(p.position_m.z(), 300.0);
    ASSERT_LE(std::abs(p.position_m.x()), 150.0);
    ASSERT_LE(std::abs(p.position_m.y()), 150.0);
    ASSERT_EQ(p.pitch_deg, 0.0);
    ASSERT_EQ(p.roll_deg, 0.0);
    ASSERT_GE(p.yaw_deg, 0.0);
    ASSERT_LT(p.yaw_deg, 360.0);
    sum += p.yaw_deg;
  }
  // U(0, 360): mean 180, standard error 360 / sqrt(12 n)
  const double se = 360.0 / std::sqrt(12.0 * n);
  EXPECT_NEAR(sum / n, 180.0, 3.0 * se);
}

TEST(Kinematics, StepAlongBodyX) {
  Rng rng(1);
  const KinematicsConfig cfg = quiet();
  Pose p;
  const Pose a = step_pose(p, cfg, rng);
  EXPECT_NEAR(a.position_m.x(), 5.0, 1e-12);
  EXPECT_NEAR(a.position_m.y(), 0.0, 1e-12);
  EXPECT_NEAR(a.position_m.z(), 0.0, 1e-12);
  p.yaw_deg = 90.0;
  const Pose b = step_pose(p, cfg, rng);
  EXPECT_NEAR(b.position_m.x(), 0.0, 1e-12);
  EXPECT_NEAR(b.position_m.y(), 5.0, 1e-12);
  EXPECT_NEAR(b.position_m.z(), 0.0, 1e-12);
}

TEST(Kinematics, RotationIsOrthonormal) {
  Rng rng(2);
  std::uniform_real_distribution<double> ang(-400.0, 400.0);
  for (int i = 0; i < 200; ++i) {
    Pose p;
    p.yaw_deg = ang(rng);
    p.pitch_deg = ang(rng);
    p.roll_deg = ang(rng);
    const Eigen::Matrix3d r = body_to_world(p);
    EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

// Property: every step moves exactly v * dt whatever the noise draws.
TEST(Kinematics, PropertyStepLength) {
  Rng rng(3);
  KinematicsConfig cfg;
  cfg.steps = 200;
  for (int t = 0; t < 20; ++t) {
    Pose prev = initial_pose(rng, cfg);
    for (std::size_t s = 0; s < cfg.steps; ++s) {
      const Pose next = step_pose(prev, cfg, rng);
      ASSERT_NEAR((next.position_m - prev.position_m).norm(), 5.0, 1e-9);
      ASSERT_EQ(next.pitch_deg, 0.0);
      prev = next;
    }
  }
}

TEST(Kinematics, TrajectoryReproducible) {
  KinematicsConfig cfg;
  Rng a(77), b(77);
  const auto pa = simulate_trajectory(cfg, a);
  const auto pb = simulate_trajectory(cfg, b);
  ASSERT_EQ(pa.size(), cfg.steps);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].position_m, pb[i].position_m);
    EXPECT_EQ(pa[i].yaw_deg, pb[i].yaw_deg);
    EXPECT_EQ(pa[i].roll_deg, pb[i].roll_deg);
  }
}

TEST(Aspect, HandEvaluated) {
  Pose p;
  const AspectSample s = aspect_angle(p, Eigen::Vector3d(100.0, 0.0, -100.0));
  EXPECT_NEAR(s.range_m, 100.0 * std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(s.azimuth_deg, 0.0, 1e-12);
  EXPECT_NEAR(s.elevation_deg, 45.0, 1e-12);

  const AspectSample side = aspect_angle(p, Eigen::Vector3d(0.0, 50.0, 0.0));
  EXPECT_NEAR(side.azimuth_deg, 90.0, 1e-12);
  EXPECT_NEAR(side.elevation_deg, 0.0, 1e-12);
}

TEST(Aspect, RadarStraightBelow) {
  Pose p;
  p.position_m = Eigen::Vector3d(10.0, -4.0, 250.0);
  p.yaw_deg = 33.0;
  const AspectSample s = aspect_angle(p, Eigen::Vector3d(10.0, -4.0, 0.0));
  EXPECT_NEAR(s.elevation_deg, 90.0, 1e-9);
  EXPECT_NEAR(s.range_m, 250.0, 1e-12);
  EXPECT_TRUE(std::isfinite(s.azimuth_deg));
  EXPECT_EQ(s.azimuth_deg, aspect_angle(p, Eigen::Vector3d(10.0, -4.0, 0.0)).azimuth_deg);
}

TEST(Aspect, CoincidentRadarIsGeometryError) {
  Pose p;
  p.position_m = Eigen::Vector3d(1.0, 2.0, 3.0);
  EXPECT_THROW(aspect_angle(p, Eigen::Vector3d(1.0, 2.0, 3.0)), GeometryError);
}

// Properties over random level poses: yaw by psi shifts azimuths by -psi; moving
// pose and radars together changes nothing; range is the world distance.
TEST(Aspect, PropertyEquivarianceAndInvariance) {
  Rng rng(4);
  std::uniform_real_distribution<double> pos(-500.0, 500.0), ang(0.0, 360.0), roll(-30.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    Pose p;
    p.position_m = Eigen::Vector3d(pos(rng), pos(rng), 200.0 + pos(rng) / 5.0);
    p.yaw_deg = ang(rng);
    const Eigen::Vector3d radar(pos(rng), pos(rng), 0.0);
    const AspectSample base = aspect_angle(p, radar);

    const double psi = ang(rng);
    Pose turned = p;
    turned.yaw_deg += psi;
    const AspectSample rot = aspect_angle(turned, radar);
    ASSERT_NEAR(wrap180(rot.azimuth_deg - (base.azimuth_deg - psi)), 0.0, 1e-9);
    ASSERT_NEAR(rot.elevation_deg, base.elevation_deg, 1e-9);
    ASSERT_NEAR(rot.range_m, base.range_m, 1e-9);

    p.roll_deg = roll(rng);
    const AspectSample rolled = aspect_angle(p, radar);
    const Eigen::Vector3d shift(pos(rng), pos(rng), pos(rng));
    Pose moved = p;
    moved.position_m += shift;
    const AspectSample tr = aspect_angle(moved, radar + shift);
    ASSERT_NEAR(tr.azimuth_deg, rolled.azimuth_deg, 1e-9);
    ASSERT_NEAR(tr.elevation_deg, rolled.elevation_deg, 1e-9);
    ASSERT_NEAR(tr.range_m, rolled.range_m, 1e-9);
    ASSERT_NEAR(rolled.range_m, (radar - p.position_m).norm(), 1e-9);
  }
}

TEST(RadarGrid, Layouts) {
  const RadarArray one = make_radar_grid(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.positions_m[0], Eigen::Vector3d(-150.0, -150.0, 0.0));

  const RadarArray four = make_radar_grid(4, 150.0);
  ASSERT_EQ(four.size(), 4u);
  for (const auto& r : four.positions_m) {
    EXPECT_DOUBLE_EQ(std::abs(r.x()), 150.0);
    EXPECT_DOUBLE_EQ(std::abs(r.y()), 150.0);
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& r : four.positions_m) centroid += r;
  EXPECT_LT(centroid.norm(), 1e-12);

  const RadarArray sixteen = make_radar_grid(16, 150.0);
  ASSERT_EQ(sixteen.size(), 16u);
  EXPECT_DOUBLE_EQ(sixteen.positions_m[1].y(), -50.0);  // linspace(-150, 150, 4)
  for (std::size_t j : {1u, 4u, 16u, 64u})
    for (const auto& r : make_radar_grid(j).positions_m) EXPECT_EQ(r.z(), 0.0);

  EXPECT_THROW(make_radar_grid(0), ConfigError);
  EXPECT_THROW(make_radar_grid(5), ConfigError);
}
