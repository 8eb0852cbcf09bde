#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bews/estimators.hpp"
#include "bews/turbine.hpp"

namespace bews {

enum class EstimatorKind { Pin, Coleman, Both };

/// One closed-loop run: wind field -> blade moments -> residuals ->
/// estimator(s), single rate, fixed step.
struct Scenario {
  RotorParams rotor{};
  std::optional<std::string> surface_file;  // analytic surrogate when absent
  double surface_azimuth_amplitude = 0.05;
  WindFieldConfig wind{};
  EstimatorKind estimator = EstimatorKind::Both;
  EstimatorGains gains = EstimatorGains::from_coleman(0.6, 1.2, RotorParams{}.rotor_speed_rad_s);
  double dt_s = 0.005;
  double duration_s = 300.0;
  std::uint64_t seed = 1;
  double initial_estimate_m_s = 8.0;
  double initial_azimuth_rad = 0.0;
  double feedback_sign = -1.0;
  ClampLimits clamp{};
  /// Residuals are divided by this moment scale before entering the
  /// estimators so the gain set stays a rate constant regardless of rotor
  /// size; 0 picks the moment sensitivity dm/dU at the initial estimate.
  double moment_scale_nm = 0.0;

  double revolution_s() const { return 2.0 * 3.14159265358979323846 / rotor.rotor_speed_rad_s; }
  void validate() const;
};

struct Trace {
  std::vector<double> t;
  std::vector<double> psi;
  std::array<std::vector<double>, 3> wind;
  std::array<std::vector<double>, 3> moment;
  std::array<std::vector<double>, 3> eps_pin;      // raw Nm residuals
  std::array<std::vector<double>, 3> eps_coleman;  // raw Nm residuals
  std::array<std::vector<double>, 3> estimate_pin;
  std::array<std::vector<double>, 3> estimate_coleman;
  bool has_pin = false;
  bool has_coleman = false;
  long pin_clamp_events = 0;
  long coleman_clamp_events = 0;
  double moment_scale_nm = 0.0;

  std::size_t size() const { return t.size(); }
};

TurbineModel build_model(const Scenario& scenario);

/// Effective estimate clamp: the configured limits intersected with the
/// wind interval the moment surface can evaluate.
ClampLimits effective_clamp(const Scenario& scenario, const TurbineModel& model);

/// Deterministic closed-loop execution. Each record holds the state at
/// t = k*dt: azimuth, true wind, measured moments, the residuals computed
/// from the estimates entering the step, and the estimates produced by the
/// step. Throws NonFinite (with the step index) on divergence.
Trace run(const Scenario& scenario);

/// Fixed-header CSV: t,psi,U1..U3,m1..m3 then eps1..eps3,Uhat1..Uhat3 per
/// active estimator (suffixed _pin/_coleman when both run).
void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace bews
