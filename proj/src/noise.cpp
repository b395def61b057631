#include "atr/noise.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "atr/error.hpp"

namespace atr {

namespace {
constexpr double kPsdTolerance = 1e-9;
}

void NoiseConfig::validate() const {
  if (!(jitter_halfwidth_az_deg >= 0.0) || !(jitter_halfwidth_el_deg >= 0.0)) {
    throw ConfigError("jitter half-widths must be >= 0");
  }
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
}

ColoredCovariance sample_colored_covariance(int f, Rng& rng) {
  if (f < 1) throw InputError("covariance dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(f, f);
  for (int r = 0; r < f; ++r)
    for (int c = 0; c < f; ++c) m(r, c) = normal(rng);
  ColoredCovariance out;
  out.sigma = m * m.transpose();
  // MM^T is symmetric in exact arithmetic; mirror to make it bitwise so.
  out.sigma.triangularView<Eigen::StrictlyLower>() =
      out.sigma.triangularView<Eigen::StrictlyUpper>().transpose();
  return out;
}

ColoredCovariance scale_to_snr(const ColoredCovariance& sigma, std::span<const double> signature,
                               double snr_db) {
  if (static_cast<Eigen::Index>(signature.size()) != sigma.dim()) {
    throw ShapeError("signature length does not match covariance dimension");
  }
  if (!std::isfinite(snr_db)) throw InputError("snr_db must be finite");
  double power = 0.0;
  for (double v : signature) {
    if (!std::isfinite(v)) throw InputError("signature must be finite");
    power += v * v;
  }
  const double tr = sigma.trace();
  if (!(tr > 0.0)) throw NumericalError("covariance has zero trace");
  if (!(power > 0.0)) throw NumericalError("signature has zero power");
  const double target = power / std::pow(10.0, snr_db / 10.0);
  return ColoredCovariance{sigma.sigma * (target / tr)};
}

std::vector<double> apply_acgn(std::span<const double> signature,
                               const ColoredCovariance& sigma_scaled, Rng& rng) {
  const Eigen::Index n = sigma_scaled.dim();
  if (static_cast<Eigen::Index>(signature.size()) != n) {
    throw ShapeError("signature length does not match covariance dimension");
  }
  std::vector<double> out(signature.begin(), signature.end());
  if (sigma_scaled.sigma.isZero(0.0)) return out;

  Eigen::VectorXd z(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);

  Eigen::VectorXd eps;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_scaled.sigma);
  if (llt.info() == Eigen::Success) {
    eps = llt.matrixL() * z;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_scaled.sigma);
    if (es.info() != Eigen::Success) throw NumericalError("covariance eigen-decomposition failed");
    Eigen::VectorXd lambda = es.eigenvalues();
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lambda(i) < -kPsdTolerance * scale) {
        throw NumericalError("covariance is indefinite beyond tolerance");
      }
      lambda(i) = std::max(lambda(i), 0.0);
    }
    eps = es.eigenvectors() * (lambda.cwiseSqrt().asDiagonal() * z);
  }
  for (Eigen::Index i = 0; i < n; ++i) out[i] += eps(i);
  return out;
}

std::pair<double, double> jitter_angles(double azimuth_deg, double elevation_deg,
                                        const NoiseConfig& cfg, Rng& rng) {
  auto draw = [&rng](double a) {
    return a > 0.0 ? std::uniform_real_distribution<double>(-a, a)(rng) : 0.0;
  };
  const double daz = draw(cfg.jitter_halfwidth_az_deg);
  const double del = draw(cfg.jitter_halfwidth_el_deg);
  return {azimuth_deg + daz, elevation_deg + del};
}

std::vector<double> noisy_signature(std::span<const double> signature, const NoiseConfig& cfg,
                                    Rng& rng) {
  if (!cfg.rcs_noise) return {signature.begin(), signature.end()};
  const auto sigma = sample_colored_covariance(static_cast<int>(signature.size()), rng);
  return apply_acgn(signature, scale_to_snr(sigma, signature, cfg.snr_db), rng);
}

}  // namespace atr
