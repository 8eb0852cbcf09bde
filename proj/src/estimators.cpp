#include "bews/estimators.hpp"

#include <cmath>

namespace bews {

EstimatorGains::EstimatorGains(double k_p, double k_i, double K_col, double K_0, double omega0)
    : k_p(k_p), k_i(k_i), K_col(K_col), K_0(K_0), omega0(omega0) {
  if (!(k_p > 0.0 && k_i > 0.0 && K_col > 0.0 && K_0 > 0.0))
    throw std::invalid_argument("EstimatorGains: gains must be strictly positive");
  if (!(omega0 > 0.0)) throw std::invalid_argument("EstimatorGains: omega0 must be positive");
}

EstimatorGains EstimatorGains::from_coleman(double K_col, double K_0, double omega0) {
  const auto [k_p, k_i] = theorem1_map(K_col, K_0, omega0);
  return EstimatorGains(k_p, k_i, K_col, K_0, omega0);
}

std::pair<double, double> theorem1_map(double K_col, double K_0, double omega0) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("theorem1_map: omega0 must be positive");
  return {K_0 / (3.0 * omega0), K_col / 3.0};
}

RationalTf notch_peak(double omega_r) {
  Eigen::VectorXd num(2), den(3);
  num << 2.0 * omega_r, 0.0;
  den << 1.0, 0.0, omega_r * omega_r;
  return RationalTf(num, den);
}

RationalTf pin_transfer_function(double k_p, double k_i, double omega_r) {
  return tf_add(tf_scale(notch_peak(omega_r), k_p), RationalTf::integrator(k_i));
}

TfMatrix3 build_c_pin(const EstimatorGains& gains, double omega_r) {
  TfMatrix3 m;
  const RationalTf k = pin_transfer_function(gains.k_p, gains.k_i, omega_r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.entries[i][j] = (i == j) ? k : RationalTf::zero();
  return m;
}

TfMatrix3 build_c_col(const EstimatorGains& gains, double omega0) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("build_c_col: omega0 must be positive");
  const double w2 = omega0 * omega0;
  Eigen::VectorXd den(4);
  den << 3.0, 0.0, 3.0 * w2, 0.0;  // 3 s (s^2 + w0^2)

  Eigen::VectorXd na(3), nb(3), nc(3);
  na << 2.0 * gains.K_0 + gains.K_col, 0.0, gains.K_col * w2;
  nb << gains.K_col - gains.K_0, std::sqrt(3.0) * gains.K_0 * omega0, gains.K_col * w2;
  nc << gains.K_col - gains.K_0, -std::sqrt(3.0) * gains.K_0 * omega0, gains.K_col * w2;

  const RationalTf a(na, den), b(nb, den), c(nc, den);
  TfMatrix3 m;
  m.entries = {{{a, b, c}, {c, a, b}, {b, c, a}}};
  return m;
}

double residual(const TurbineModel& model, double omega_r, double estimate, double psi,
                double measured_moment) {
  return model.moment_at(omega_r, estimate, psi) - measured_moment;
}

BladeTriplet residuals(const TurbineModel& model, double omega_r, const BladeTriplet& estimates,
                       const AzimuthTriplet& psi, const BladeTriplet& measured_moments) {
  BladeTriplet eps;
  eps.b1 = residual(model, omega_r, estimates.b1, psi.psi1, measured_moments.b1);
  eps.b2 = residual(model, omega_r, estimates.b2, psi.psi2, measured_moments.b2);
  eps.b3 = residual(model, omega_r, estimates.b3, psi.psi3, measured_moments.b3);
  return eps;
}

namespace {

double clamp_count(double value, const ClampLimits& clamp, long& events) {
  if (!(std::abs(value) <= kDivergenceLimitMs))
    throw NonFinite("estimate diverged beyond " + std::to_string(kDivergenceLimitMs) + " m/s");
  if (value < clamp.lo) {
    ++events;
    return clamp.lo;
  }
  if (value > clamp.hi) {
    ++events;
    return clamp.hi;
  }
  return value;
}

}  // namespace

PinEstimator::PinEstimator(double k_p, double k_i, double initial_estimate, ClampLimits clamp,
                           double feedback_sign)
    : k_p_(k_p),
      k_i_(k_i),
      feedback_sign_(feedback_sign),
      clamp_(clamp),
      initial_estimate_(initial_estimate),
      estimates_{initial_estimate, initial_estimate, initial_estimate} {
  if (!(k_i > 0.0)) throw std::invalid_argument("PinEstimator: k_i must be positive");
  if (k_p < 0.0) throw std::invalid_argument("PinEstimator: k_p must be non-negative");
}

PinEstimator::PinEstimator(const EstimatorGains& gains, double initial_estimate, ClampLimits clamp,
                           double feedback_sign)
    : PinEstimator(gains.k_p, gains.k_i, initial_estimate, clamp, feedback_sign) {}

void PinEstimator::ensure_realization(double omega_r) {
  if (omega_r == scheduled_omega_) return;
  const bool first = scheduled_omega_ < 0.0;
  realization_ = realize(pin_transfer_function(k_p_, k_i_, omega_r));
  scheduled_omega_ = omega_r;
  if (first) {
    // Hold the initial estimate: x = (u0 / (k_i w^2), 0, 0) is stationary
    // under zero input and the output row starts with k_i w^2.
    for (auto& x : state_) {
      x = realization_.zero_state();
      x[0] = initial_estimate_ / (k_i_ * omega_r * omega_r);
    }
  }
}

void PinEstimator::step(const BladeTriplet& eps, double omega_r, double dt) {
  ensure_realization(omega_r);
  double out[3];
  for (int b = 0; b < 3; ++b) {
    StepResult r = step_state(realization_, state_[b], feedback_sign_ * eps[b], dt);
    state_[b] = std::move(r.state);
    out[b] = clamp_count(r.output, clamp_, clamp_events_);
  }
  estimates_ = {out[0], out[1], out[2]};
}

ColemanEstimator::ColemanEstimator(double K_col, double K_0, double initial_estimate,
                                   ClampLimits clamp, double feedback_sign)
    : channel_gains_(K_col, K_0, K_0),
      feedback_sign_(feedback_sign),
      clamp_(clamp),
      state_(initial_estimate, 0.0, 0.0),
      estimates_{initial_estimate, initial_estimate, initial_estimate} {
  if (!(K_col > 0.0)) throw std::invalid_argument("ColemanEstimator: K_col must be positive");
  if (K_0 < 0.0) throw std::invalid_argument("ColemanEstimator: K_0 must be non-negative");
}

ColemanEstimator::ColemanEstimator(const EstimatorGains& gains, double initial_estimate,
                                   ClampLimits clamp, double feedback_sign)
    : ColemanEstimator(gains.K_col, gains.K_0, initial_estimate, clamp, feedback_sign) {}

void ColemanEstimator::drive(const BladeTriplet& input, const AzimuthTriplet& psi, double dt) {
  // Pure integrators under zero-order hold: the RK4 increment reduces to
  // gain * u * dt exactly.
  state_ += dt * channel_gains_.cwiseProduct(forward_coleman(psi, input).vec());
  if (!state_.allFinite())
    throw NonFinite("ColemanEstimator: integrator state became non-finite");
}

BladeTriplet ColemanEstimator::project(const AzimuthTriplet& psi) const {
  return inverse_coleman(psi, NrfTriplet::from(state_));
}

void ColemanEstimator::step(const BladeTriplet& eps, const AzimuthTriplet& psi, double dt) {
  drive({feedback_sign_ * eps.b1, feedback_sign_ * eps.b2, feedback_sign_ * eps.b3}, psi, dt);
  const BladeTriplet raw = project(psi);
  estimates_ = {clamp_count(raw.b1, clamp_, clamp_events_),
                clamp_count(raw.b2, clamp_, clamp_events_),
                clamp_count(raw.b3, clamp_, clamp_events_)};
}

}  // namespace bews
