#include "bews/turbine.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bews/num_format.hpp"

namespace bews {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Smooth deficit bump centred on psi = pi (blade in front of the tower),
// zero outside |psi - pi| <= pi/3.
double shadow_bump(double psi) {
  const double d = wrap_two_pi(psi) - std::numbers::pi;
  if (std::abs(d) > std::numbers::pi / 3.0) return 0.0;
  const double c = std::cos(1.5 * d);
  return c * c;
}

}  // namespace

void RotorParams::validate() const {
  if (!(radius_m > 0.0) || !(air_density_kg_m3 > 0.0) || !(rotor_speed_rad_s > 0.0))
    throw std::invalid_argument("RotorParams: radius, density and rotor speed must be positive");
}

ConeCoefficientSurface::ConeCoefficientSurface(Eigen::VectorXd lambda_grid,
                                               Eigen::VectorXd psi_grid, Eigen::MatrixXd values)
    : lambda_(std::move(lambda_grid)), psi_(std::move(psi_grid)), values_(std::move(values)) {
  if (lambda_.size() < 2 || psi_.size() < 2)
    throw std::invalid_argument("ConeCoefficientSurface: need at least a 2x2 grid");
  if (values_.rows() != psi_.size() || values_.cols() != lambda_.size())
    throw std::invalid_argument("ConeCoefficientSurface: value table shape mismatch");
  if (!values_.allFinite())
    throw std::invalid_argument("ConeCoefficientSurface: non-finite table values");
  for (Eigen::Index i = 0; i + 1 < lambda_.size(); ++i)
    if (!(lambda_[i + 1] > lambda_[i]))
      throw std::invalid_argument("ConeCoefficientSurface: lambda breakpoints must ascend");
  for (Eigen::Index i = 0; i + 1 < psi_.size(); ++i)
    if (!(psi_[i + 1] > psi_[i]))
      throw std::invalid_argument("ConeCoefficientSurface: psi breakpoints must ascend");
  if (psi_[psi_.size() - 1] - psi_[0] >= kTwoPi)
    throw std::invalid_argument("ConeCoefficientSurface: psi breakpoints must span < 2*pi");

  // One slope sign in lambda across the whole grid (monotone sensitivity).
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    for (Eigen::Index c = 0; c + 1 < values_.cols(); ++c) {
      const double d = values_(r, c + 1) - values_(r, c);
      const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
      if (sign == 0 || (slope_sign_ != 0 && sign != slope_sign_))
        throw std::invalid_argument(
            "ConeCoefficientSurface: table must be strictly monotone in lambda with one sign");
      if (slope_sign_ == 0) slope_sign_ = sign;
    }
  }
}

double ConeCoefficientSurface::value(double lambda, double psi) const {
  if (!(lambda >= lambda_min() && lambda <= lambda_max()))
    throw OutOfEnvelope("cone coefficient: tip-speed ratio " + format_double(lambda) +
                        " outside grid [" + format_double(lambda_min()) + ", " +
                        format_double(lambda_max()) + "]");

  Eigen::Index li = 0;
  while (li + 2 < lambda_.size() && lambda >= lambda_[li + 1]) ++li;
  const double lu = (lambda - lambda_[li]) / (lambda_[li + 1] - lambda_[li]);

  // Periodic azimuth: the final cell wraps from the last breakpoint back to
  // the first plus 2*pi.
  const double base = psi_[0];
  const double p = base + wrap_two_pi(psi - base);
  Eigen::Index pi_idx = 0;
  while (pi_idx + 1 < psi_.size() && p >= psi_[pi_idx + 1]) ++pi_idx;
  double pu;
  Eigen::Index pnext;
  if (pi_idx + 1 < psi_.size()) {
    pu = (p - psi_[pi_idx]) / (psi_[pi_idx + 1] - psi_[pi_idx]);
    pnext = pi_idx + 1;
  } else {
    pu = (p - psi_[pi_idx]) / (base + kTwoPi - psi_[pi_idx]);
    pnext = 0;
  }

  const double lo = (1.0 - lu) * values_(pi_idx, li) + lu * values_(pi_idx, li + 1);
  const double hi = (1.0 - lu) * values_(pnext, li) + lu * values_(pnext, li + 1);
  return (1.0 - pu) * lo + pu * hi;
}

ConeCoefficientSurface ConeCoefficientSurface::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cone coefficient table: cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof())
      throw std::invalid_argument("cone coefficient table: non-numeric token in " + path.string());
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.size() < 3)
    throw std::invalid_argument("cone coefficient table: need lambda row plus >= 2 psi rows");

  const std::size_t n_lambda = rows[0].size();
  Eigen::VectorXd lambda(n_lambda);
  for (std::size_t i = 0; i < n_lambda; ++i) lambda[i] = rows[0][i];

  const std::size_t n_psi = rows.size() - 1;
  Eigen::VectorXd psi(n_psi);
  Eigen::MatrixXd values(n_psi, n_lambda);
  for (std::size_t r = 0; r < n_psi; ++r) {
    if (rows[r + 1].size() != n_lambda + 1)
      throw std::invalid_argument("cone coefficient table: row " + std::to_string(r + 2) +
                                  " must hold psi plus " + std::to_string(n_lambda) + " values");
    psi[r] = rows[r + 1][0];
    for (std::size_t c = 0; c < n_lambda; ++c) values(r, c) = rows[r + 1][c + 1];
  }
  return ConeCoefficientSurface(lambda, psi, values);
}

void ConeCoefficientSurface::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cone coefficient table: cannot write " + path.string());
  out << "# cone coefficient table: first row lambda breakpoints, first column psi"
         " breakpoints [rad], body C_m\n";
  for (Eigen::Index c = 0; c < lambda_.size(); ++c)
    out << (c ? " " : "") << format_double(lambda_[c]);
  out << "\n";
  for (Eigen::Index r = 0; r < psi_.size(); ++r) {
    out << format_double(psi_[r]);
    for (Eigen::Index c = 0; c < lambda_.size(); ++c) out << " " << format_double(values_(r, c));
    out << "\n";
  }
}

ConeCoefficientSurface default_surface(double azimuth_amplitude) {
  if (!(std::abs(azimuth_amplitude) < 1.0))
    throw std::invalid_argument("default_surface: |azimuth amplitude| must stay below 1");

  const double c0 = 0.45, c1 = -0.022, c2 = 0.0002;
  const int n_lambda = 91;  // [3, 12] step 0.1
  const int n_psi = 64;     // [0, 2pi) step 2pi/64

  Eigen::VectorXd lambda(n_lambda), psi(n_psi);
  for (int i = 0; i < n_lambda; ++i) lambda[i] = 3.0 + 0.1 * i;
  for (int i = 0; i < n_psi; ++i) psi[i] = kTwoPi * i / n_psi;

  Eigen::MatrixXd values(n_psi, n_lambda);
  for (int r = 0; r < n_psi; ++r)
    for (int c = 0; c < n_lambda; ++c) {
      const double l = lambda[c];
      values(r, c) = (c0 + c1 * l + c2 * l * l) * (1.0 + azimuth_amplitude * std::cos(psi[r]));
    }
  return ConeCoefficientSurface(lambda, psi, values);
}

double moment(const RotorParams& params, const ConeCoefficientSurface& surface, double omega_r,
              double wind_speed, double dynamic_pressure, double psi) {
  if (!(wind_speed > 0.0))
    throw OutOfEnvelope("moment: wind speed must be positive, got " + format_double(wind_speed));
  const double lambda = omega_r * params.radius_m / wind_speed;
  const double area = std::numbers::pi * params.radius_m * params.radius_m;
  return dynamic_pressure * area * params.radius_m * surface.value(lambda, psi);
}

double TurbineModel::sensitivity(double omega_r, double wind_speed, double psi) const {
  const double h = 1e-4 * wind_speed;
  return (moment_at(omega_r, wind_speed + h, psi) - moment_at(omega_r, wind_speed - h, psi)) /
         (2.0 * h);
}

std::pair<double, double> TurbineModel::wind_envelope(double omega_r) const {
  const double tip_speed = omega_r * params.radius_m;
  // Small interior margin so a query at the clamp bound cannot round onto
  // the wrong side of the grid edge.
  return {tip_speed / surface.lambda_max() * (1.0 + 1e-9),
          tip_speed / surface.lambda_min() * (1.0 - 1e-9)};
}

void WindFieldConfig::validate() const {
  if (!(mean_m_s > 0.0)) throw NonPositiveWind("wind config: mean must be positive");
  double budget = mean_m_s * (1.0 - std::abs(shear) - std::abs(tower_shadow));
  for (const WindHarmonic& h : harmonics) {
    if (!(h.multiple > 0.0))
      throw std::invalid_argument("wind config: harmonic multiple must be positive");
    budget -= std::abs(h.amplitude);
  }
  if (!(budget > 0.0))
    throw NonPositiveWind("wind config: amplitude budget drives the wind non-positive");
  if (noise_std_m_s < 0.0) throw std::invalid_argument("wind config: negative noise std");
}

WindField::WindField(WindFieldConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  config_.validate();
}

BladeTriplet WindField::sample(const AzimuthTriplet& psi, double) {
  double u[3];
  for (int i = 0; i < 3; ++i) {
    const double p = psi[i];
    double v = config_.mean_m_s * (1.0 + config_.shear * std::cos(p));
    v -= config_.mean_m_s * config_.tower_shadow * shadow_bump(p);
    for (const WindHarmonic& h : config_.harmonics)
      v += h.amplitude * std::sin(h.multiple * p + h.phase);
    if (config_.noise_std_m_s > 0.0) v += config_.noise_std_m_s * normal_(rng_);
    if (!(v > 0.0))
      throw NonPositiveWind("wind sample: blade " + std::to_string(i + 1) +
                            " wind speed non-positive");
    u[i] = v;
  }
  return {u[0], u[1], u[2]};
}

}  // namespace bews
