#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "bews/coleman.hpp"
#include "bews/errors.hpp"

namespace bews {

struct RotorParams {
  double radius_m = 60.0;
  double air_density_kg_m3 = 1.225;
  double rotor_speed_rad_s = 2.0 * 3.14159265358979323846 * 0.2;  // 1P at 0.2 Hz

  void validate() const;
};

/// Nondimensional cone coefficient C_m tabulated over tip-speed ratio and
/// azimuth, with bilinear interpolation. Azimuth is periodic; tip-speed
/// ratio queries outside the grid raise OutOfEnvelope. The table must be
/// strictly monotone in tip-speed ratio with one slope sign across the whole
/// grid, which makes the moment map monotone in wind speed.
class ConeCoefficientSurface {
 public:
  ConeCoefficientSurface(Eigen::VectorXd lambda_grid, Eigen::VectorXd psi_grid,
                         Eigen::MatrixXd values);  // values(psi index, lambda index)

  double value(double lambda, double psi) const;

  double lambda_min() const { return lambda_[0]; }
  double lambda_max() const { return lambda_[lambda_.size() - 1]; }
  int slope_sign() const { return slope_sign_; }

  const Eigen::VectorXd& lambda_grid() const { return lambda_; }
  const Eigen::VectorXd& psi_grid() const { return psi_; }
  const Eigen::MatrixXd& values() const { return values_; }

  /// Plain-text delimited grid: first row lambda breakpoints, first column
  /// azimuth breakpoints, body C_m values. Lines starting with '#' ignored.
  static ConeCoefficientSurface from_file(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;

 private:
  Eigen::VectorXd lambda_;
  Eigen::VectorXd psi_;
  Eigen::MatrixXd values_;
  int slope_sign_ = 0;
};

/// Analytic surrogate (c0 + c1 L + c2 L^2)(1 + a cos psi) tabulated on
/// lambda in [3, 12] step 0.1, psi in [0, 2pi) step 2pi/64. The quadratic
/// decreases in lambda, so the moment map increases in wind speed.
ConeCoefficientSurface default_surface(double azimuth_amplitude = 0.05);

/// Out-of-plane bending moment: m = q * pi R^2 * R * C_m(lambda, psi) with
/// lambda = omega_r R / U. Throws OutOfEnvelope when lambda leaves the grid.
double moment(const RotorParams& params, const ConeCoefficientSurface& surface, double omega_r,
              double wind_speed, double dynamic_pressure, double psi);

/// Rotor parameters plus moment surface, the bundle the estimators run
/// against.
struct TurbineModel {
  RotorParams params;
  ConeCoefficientSurface surface;

  double dynamic_pressure(double wind_speed) const {
    return 0.5 * params.air_density_kg_m3 * wind_speed * wind_speed;
  }
  double moment_at(double omega_r, double wind_speed, double psi) const {
    return moment(params, surface, omega_r, wind_speed, dynamic_pressure(wind_speed), psi);
  }
  /// Central-difference dm/dU, h = 1e-4 * U.
  double sensitivity(double omega_r, double wind_speed, double psi) const;
  /// Wind-speed interval whose tip-speed ratio stays on the surface grid.
  std::pair<double, double> wind_envelope(double omega_r) const;
};

struct WindHarmonic {
  double multiple = 1.0;    // multiple of the 1P frequency
  double amplitude = 0.0;   // m/s
  double phase = 0.0;       // rad
};

struct WindFieldConfig {
  double mean_m_s = 12.0;
  double shear = 0.0;             // 1P fraction of the mean
  double tower_shadow = 0.0;      // deficit fraction of the mean
  std::vector<WindHarmonic> harmonics;
  double noise_std_m_s = 0.0;

  /// Mean must be positive and the deterministic amplitude budget must
  /// leave every blade wind speed strictly positive.
  void validate() const;
};

/// Deterministic per-blade wind generator. Shear, tower shadow and the
/// extra harmonics are locked to blade azimuth, so the blades see exact
/// time-shifted copies of one periodic profile; optional Gaussian noise is
/// drawn per blade per sample from the seeded generator.
class WindField {
 public:
  WindField(WindFieldConfig config, std::uint64_t seed);

  /// True blade-effective wind speeds at the given azimuths. Throws
  /// NonPositiveWind if any sample is non-positive.
  BladeTriplet sample(const AzimuthTriplet& psi, double t);

  const WindFieldConfig& config() const { return config_; }

 private:
  WindFieldConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bews
