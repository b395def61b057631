#pragma once

// Random-walk UAV kinematics and radar aspect-angle geometry.
//
// Frame conventions (right-handed, angles in degrees):
//   yaw   (gamma) rotates about the body z-axis,
//   pitch (alpha) rotates about the body y-axis,
//   roll  (beta)  rotates about the body x-axis,
// and the body-to-world rotation is R = R_z(yaw) * R_y(pitch) * R_x(roll).
// The body x-axis is the UAV's forward direction.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "atr/rng.hpp"

namespace atr {

struct Pose {
  Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
};

struct RadarArray {
  std::vector<Eigen::Vector3d> positions_m;
  std::size_t size() const { return positions_m.size(); }
};

struct AspectSample {
  double range_m = 0.0;
  double azimuth_deg = 0.0;    // atan2 in the body frame, (-180, 180]
  double elevation_deg = 0.0;  // signed, +90 = radar straight below the UAV belly
};

/// How the second parameter of the yaw/roll noise normals is read.
enum class NoiseParamMode { Variance, StdDev };

struct KinematicsConfig {
  double velocity_mps = 50.0;
  double dt_s = 0.1;
  std::size_t steps = 100;
  double yaw_noise_param = 144.0;  // deg^2 when mode is Variance
  double roll_noise_param = 81.0;
  NoiseParamMode noise_mode = NoiseParamMode::Variance;
  double xy_half_width_m = 150.0;  // initial x, y ~ U(-w, w)
  double z_min_m = 200.0;
  double z_max_m = 300.0;

  double yaw_noise_std_deg() const;
  double roll_noise_std_deg() const;
  void validate() const;
};

/// Rotation body->world for a pose, R_z(yaw) R_y(pitch) R_x(roll).
Eigen::Matrix3d body_to_world(const Pose& pose);

Pose initial_pose(Rng& rng, const KinematicsConfig& cfg = {});
Pose step_pose(const Pose& prev, const KinematicsConfig& cfg, Rng& rng);

/// Initial pose followed by cfg.steps steps; returns steps poses (t = 1..L).
std::vector<Pose> simulate_trajectory(const KinematicsConfig& cfg, Rng& rng);

AspectSample aspect_angle(const Pose& pose, const Eigen::Vector3d& radar_m);
std::vector<AspectSample> aspect_angles(const Pose& pose, const RadarArray& radars);

/// sqrt(j) x sqrt(j) ground lattice spanning [-half_width, half_width]^2 at z = 0;
/// j = 1 places the single radar at the (-half_width, -half_width) corner.
RadarArray make_radar_grid(std::size_t j, double half_width_m = 150.0);

}  // namespace atr
