#pragma once

// Additive colored Gaussian noise (ACGN) at a prescribed SNR for RCS vectors,
// plus uniform angle jitter. Noise and signal power are both computed on the
// dB m^2 values themselves.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "atr/rng.hpp"

namespace atr {

struct ColoredCovariance {
  Eigen::MatrixXd sigma;
  double trace() const { return sigma.trace(); }
  Eigen::Index dim() const { return sigma.rows(); }
};

struct NoiseConfig {
  double snr_db = 0.0;
  double jitter_halfwidth_az_deg = 40.0;
  double jitter_halfwidth_el_deg = 40.0;
  bool rcs_noise = true;  // false: skip ACGN entirely (clean signatures)

  void validate() const;
};

/// Sigma = M M^T with M an f x f matrix of i.i.d. standard normals.
ColoredCovariance sample_colored_covariance(int f, Rng& rng);

/// Rescales sigma so that trace = sum_f signature(f)^2 / 10^(snr_db / 10).
ColoredCovariance scale_to_snr(const ColoredCovariance& sigma, std::span<const double> signature,
                               double snr_db);

/// signature + one draw of N(0, sigma_scaled). Uses a Cholesky factor, falling
/// back to an eigen-decomposition with eigenvalues in (-1e-9, 0) clipped to zero.
std::vector<double> apply_acgn(std::span<const double> signature,
                               const ColoredCovariance& sigma_scaled, Rng& rng);

/// Adds U(-a_az, a_az) and U(-a_el, a_el); no wrapping or clamping.
std::pair<double, double> jitter_angles(double azimuth_deg, double elevation_deg,
                                        const NoiseConfig& cfg, Rng& rng);

/// Full per-observation protocol: fresh covariance, SNR scaling, one noise draw.
/// Skips the noise when cfg.rcs_noise is false.
std::vector<double> noisy_signature(std::span<const double> signature, const NoiseConfig& cfg,
                                    Rng& rng);

}  // namespace atr
