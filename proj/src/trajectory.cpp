#include "atr/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "atr/error.hpp"

namespace atr {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double noise_std(double param, NoiseParamMode mode) {
  return mode == NoiseParamMode::Variance ? std::sqrt(param) : param;
}

}  // namespace

double KinematicsConfig::yaw_noise_std_deg() const { return noise_std(yaw_noise_param, noise_mode); }
double KinematicsConfig::roll_noise_std_deg() const {
  return noise_std(roll_noise_param, noise_mode);
}

void KinematicsConfig::validate() const {
  if (!(dt_s > 0.0)) throw ConfigError("dt must be > 0");
  if (steps < 1) throw ConfigError("trajectory needs at least one step");
  if (!(velocity_mps >= 0.0)) throw ConfigError("velocity must be >= 0");
  if (!(yaw_noise_param >= 0.0) || !(roll_noise_param >= 0.0)) {
    throw ConfigError("yaw/roll noise parameters must be >= 0");
  }
  if (!(xy_half_width_m >= 0.0) || !(z_max_m >= z_min_m)) {
    throw ConfigError("invalid initial-position bounds");
  }
}

Eigen::Matrix3d body_to_world(const Pose& pose) {
  return (Eigen::AngleAxisd(pose.yaw_deg * kDeg, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pose.pitch_deg * kDeg, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(pose.roll_deg * kDeg, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Pose initial_pose(Rng& rng, const KinematicsConfig& cfg) {
  std::uniform_real_distribution<double> yaw(0.0, 360.0);
  std::uniform_real_distribution<double> xy(-cfg.xy_half_width_m, cfg.xy_half_width_m);
  std::uniform_real_distribution<double> z(cfg.z_min_m, cfg.z_max_m);
  Pose p;
  p.yaw_deg = yaw(rng);
  const double x = xy(rng);
  const double y = xy(rng);
  p.position_m = Eigen::Vector3d(x, y, z(rng));
  return p;
}

Pose step_pose(const Pose& prev, const KinematicsConfig& cfg, Rng& rng) {
  const Eigen::Vector3d direction = body_to_world(prev) * Eigen::Vector3d::UnitX();
  Pose next;
  next.position_m = prev.position_m + cfg.velocity_mps * cfg.dt_s * direction;
  auto jitter = [&rng](double sd) {
    return sd > 0.0 ? std::normal_distribution<double>(0.0, sd)(rng) : 0.0;
  };
  const double dyaw = jitter(cfg.yaw_noise_std_deg());
  const double droll = jitter(cfg.roll_noise_std_deg());
  next.yaw_deg = prev.yaw_deg + dyaw;
  next.pitch_deg = 0.0;
  next.roll_deg = prev.roll_deg + droll;
  return next;
}

std::vector<Pose> simulate_trajectory(const KinematicsConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Pose> poses;
  poses.reserve(cfg.steps);
  Pose p = initial_pose(rng, cfg);
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    p = step_pose(p, cfg, rng);
    poses.push_back(p);
  }
  return poses;
}

AspectSample aspect_angle(const Pose& pose, const Eigen::Vector3d& radar_m) {
  const Eigen::Vector3d world_offset = radar_m - pose.position_m;
  const double range = world_offset.norm();
  if (!(range > 0.0)) throw GeometryError("radar coincides with the UAV position");
  const Eigen::Vector3d d = body_to_world(pose).transpose() * world_offset;
  AspectSample s;
  s.range_m = range;
  s.azimuth_deg = std::atan2(d.y(), d.x()) / kDeg;  // atan2(0, 0) == 0
  const double c = std::clamp(-d.z() / range, -1.0, 1.0);
  s.elevation_deg = 90.0 - std::acos(c) / kDeg;
  return s;
}

std::vector<AspectSample> aspect_angles(const Pose& pose, const RadarArray& radars) {
  std::vector<AspectSample> out;
  out.reserve(radars.size());
  for (const auto& r : radars.positions_m) out.push_back(aspect_angle(pose, r));
  return out;
}

RadarArray make_radar_grid(std::size_t j, double half_width_m) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(j))));
  if (j == 0 || side * side != j) {
    throw ConfigError("radar count " + std::to_string(j) + " is not a perfect square");
  }
  RadarArray radars;
  if (j == 1) {
    radars.positions_m.emplace_back(-half_width_m, -half_width_m, 0.0);
    return radars;
  }
  for (std::size_t ix = 0; ix < side; ++ix) {
    for (std::size_t iy = 0; iy < side; ++iy) {
      const double x = -half_width_m + 2.0 * half_width_m * static_cast<double>(ix) / (side - 1);
      const double y = -half_width_m + 2.0 * half_width_m * static_cast<double>(iy) / (side - 1);
      radars.positions_m.emplace_back(x, y, 0.0);
    }
  }
  return radars;
}

}  // namespace atr
