#pragma once

#include <array>
#include <utility>

#include "bews/coleman.hpp"
#include "bews/rational_tf.hpp"
#include "bews/state_space.hpp"
#include "bews/turbine.hpp"

namespace bews {

/// Estimator gain set. K_col drives the collective channel, K_0 the tilt
/// and yaw channels; (k_p, k_i) are the per-blade proportional/integral
/// gains, by default mapped from (K_col, K_0) so the diagonal responses of
/// the two estimators coincide.
struct EstimatorGains {
  double k_p;
  double k_i;
  double K_col;
  double K_0;
  double omega0;  // schedule rotor speed, rad/s

  EstimatorGains(double k_p, double k_i, double K_col, double K_0, double omega0);

  /// (k_p, k_i) = (K_0 / (3 omega0), K_col / 3).
  static EstimatorGains from_coleman(double K_col, double K_0, double omega0);
};

/// Gain mapping that makes the per-blade estimator match the diagonal of
/// the lifted Coleman estimator: returns (k_p, k_i) = (K_0/(3 w0), K_col/3).
std::pair<double, double> theorem1_map(double K_col, double K_0, double omega0);

/// Resonator 2 w_r s / (s^2 + w_r^2), infinite gain at the 1P frequency.
RationalTf notch_peak(double omega_r);

/// Per-blade estimator transfer function K(s) = k_p K_N(s) + k_i / s in
/// cross-multiplied form.
RationalTf pin_transfer_function(double k_p, double k_i, double omega_r);

/// Diagonal per-blade estimator matrix diag(K(s)); off-diagonal entries are
/// the zero transfer function.
TfMatrix3 build_c_pin(const EstimatorGains& gains, double omega_r);

/// Closed-form lifted Coleman estimator: circulant matrix
/// [[a, b, c], [c, a, b], [b, c, a]] with
///   a = ((2 K_0 + K_col) s^2 + K_col w0^2) / (3 s (s^2 + w0^2))
///   b = ((K_col - K_0) s^2 + sqrt(3) K_0 w0 s + K_col w0^2) / (3 s (s^2 + w0^2))
///   c = ((K_col - K_0) s^2 - sqrt(3) K_0 w0 s + K_col w0^2) / (3 s (s^2 + w0^2))
TfMatrix3 build_c_col(const EstimatorGains& gains, double omega0);

/// Moment residual: m_hat(omega_r, estimate, q_hat, psi) - measured, with
/// q_hat the dynamic pressure at the estimate. Positive when the estimate
/// is high (the moment map increases with wind speed).
double residual(const TurbineModel& model, double omega_r, double estimate, double psi,
                double measured_moment);

BladeTriplet residuals(const TurbineModel& model, double omega_r, const BladeTriplet& estimates,
                       const AzimuthTriplet& psi, const BladeTriplet& measured_moments);

struct ClampLimits {
  double lo = 0.5;   // m/s
  double hi = 40.0;  // m/s
};

/// A raw (pre-clamp) estimate beyond this magnitude is reported as
/// divergence. Clamping keeps a runaway loop's residuals bounded, so its
/// states wind up linearly instead of overflowing; this guard turns that
/// runaway into NonFinite long before IEEE infinity.
inline constexpr double kDivergenceLimitMs = 1e3;

/// Per-blade proportional-integral-notch estimator: three decoupled copies
/// of K(s) driven by the negative of the per-blade moment residual.
class PinEstimator {
 public:
  PinEstimator(double k_p, double k_i, double initial_estimate, ClampLimits clamp = {},
               double feedback_sign = -1.0);
  PinEstimator(const EstimatorGains& gains, double initial_estimate, ClampLimits clamp = {},
               double feedback_sign = -1.0);

  /// One RK4 step of each blade's K(s) realization on feedback_sign * eps.
  /// The realization is rebuilt when omega_r changes (gain scheduling).
  void step(const BladeTriplet& eps, double omega_r, double dt);

  const BladeTriplet& estimates() const { return estimates_; }
  long clamp_events() const { return clamp_events_; }

 private:
  void ensure_realization(double omega_r);

  double k_p_;
  double k_i_;
  double feedback_sign_;
  ClampLimits clamp_;
  double initial_estimate_;
  double scheduled_omega_ = -1.0;
  StateSpaceSiso realization_;
  std::array<Eigen::VectorXd, 3> state_;
  BladeTriplet estimates_;
  long clamp_events_ = 0;
};

/// Coleman estimator: forward transform, integrator bank
/// diag(K_col, K_0, K_0)/s, inverse transform. The closed-loop step applies
/// the negative feedback sign; drive/project expose the raw open-loop path
/// used for frequency-response identification.
class ColemanEstimator {
 public:
  ColemanEstimator(double K_col, double K_0, double initial_estimate, ClampLimits clamp = {},
                   double feedback_sign = -1.0);
  ColemanEstimator(const EstimatorGains& gains, double initial_estimate, ClampLimits clamp = {},
                   double feedback_sign = -1.0);

  /// Closed-loop step: integrators advance on the forward-transformed
  /// feedback_sign * eps (exact for zero-order-held input), estimates are
  /// re-projected at the given azimuth and clamped.
  void step(const BladeTriplet& eps, const AzimuthTriplet& psi, double dt);

  /// Raw integrator advance on the forward-transformed input, no sign, no
  /// clamping.
  void drive(const BladeTriplet& input, const AzimuthTriplet& psi, double dt);

  /// Unclamped inverse projection of the current integrator states.
  BladeTriplet project(const AzimuthTriplet& psi) const;

  const BladeTriplet& estimates() const { return estimates_; }
  const Eigen::Vector3d& integrator_states() const { return state_; }
  long clamp_events() const { return clamp_events_; }

 private:
  Eigen::Vector3d channel_gains_;  // (K_col, K_0, K_0)
  double feedback_sign_;
  ClampLimits clamp_;
  Eigen::Vector3d state_;  // collective, tilt, yaw integrators
  BladeTriplet estimates_;
  long clamp_events_ = 0;
};

}  // namespace bews
