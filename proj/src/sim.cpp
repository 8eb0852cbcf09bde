#include "bews/sim.hpp"

#include <cmath>
#include <numbers>

#include "bews/num_format.hpp"

namespace bews {

void Scenario::validate() const {
  rotor.validate();
  wind.validate();
  if (!(dt_s > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (duration_s < 0.0) throw std::invalid_argument("scenario: duration must be non-negative");
  const double max_dt = revolution_s() / 200.0;
  if (dt_s > max_dt)
    throw std::invalid_argument("scenario: dt " + format_double(dt_s) +
                                " exceeds one revolution / 200 = " + format_double(max_dt));
  if (!(initial_estimate_m_s > 0.0))
    throw std::invalid_argument("scenario: initial estimate must be positive");
  if (!(clamp.lo > 0.0 && clamp.hi > clamp.lo))
    throw std::invalid_argument("scenario: clamp limits must satisfy 0 < lo < hi");
  if (moment_scale_nm < 0.0)
    throw std::invalid_argument("scenario: moment scale must be non-negative");
  if (feedback_sign != 1.0 && feedback_sign != -1.0)
    throw std::invalid_argument("scenario: feedback sign must be +1 or -1");
}

TurbineModel build_model(const Scenario& scenario) {
  if (scenario.surface_file)
    return {scenario.rotor, ConeCoefficientSurface::from_file(*scenario.surface_file)};
  return {scenario.rotor, default_surface(scenario.surface_azimuth_amplitude)};
}

ClampLimits effective_clamp(const Scenario& scenario, const TurbineModel& model) {
  const auto [lo, hi] = model.wind_envelope(scenario.rotor.rotor_speed_rad_s);
  return {std::max(scenario.clamp.lo, lo), std::min(scenario.clamp.hi, hi)};
}

Trace run(const Scenario& scenario) {
  scenario.validate();

  const TurbineModel model = build_model(scenario);
  const ClampLimits clamp = effective_clamp(scenario, model);
  const double omega_r = scenario.rotor.rotor_speed_rad_s;
  const double moment_scale =
      scenario.moment_scale_nm > 0.0
          ? scenario.moment_scale_nm
          : model.sensitivity(omega_r, scenario.initial_estimate_m_s, 0.0);

  WindField wind(scenario.wind, scenario.seed);

  const bool want_pin = scenario.estimator != EstimatorKind::Coleman;
  const bool want_coleman = scenario.estimator != EstimatorKind::Pin;
  std::optional<PinEstimator> pin;
  std::optional<ColemanEstimator> coleman;
  if (want_pin)
    pin.emplace(scenario.gains, scenario.initial_estimate_m_s, clamp, scenario.feedback_sign);
  if (want_coleman)
    coleman.emplace(scenario.gains, scenario.initial_estimate_m_s, clamp, scenario.feedback_sign);

  Trace trace;
  trace.has_pin = want_pin;
  trace.has_coleman = want_coleman;
  trace.moment_scale_nm = moment_scale;

  const auto steps = static_cast<std::size_t>(std::floor(scenario.duration_s / scenario.dt_s + 1e-9));
  trace.t.reserve(steps);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * scenario.dt_s;
    // Azimuth advances exactly linearly; it is accumulated unwrapped and
    // wrapped only inside the trig calls.
    const double psi = scenario.initial_azimuth_rad + omega_r * t;
    const AzimuthTriplet at(psi);

    const BladeTriplet u = wind.sample(at, t);
    BladeTriplet m;
    m.b1 = model.moment_at(omega_r, u.b1, at.psi1);
    m.b2 = model.moment_at(omega_r, u.b2, at.psi2);
    m.b3 = model.moment_at(omega_r, u.b3, at.psi3);

    trace.t.push_back(t);
    trace.psi.push_back(psi);
    for (int b = 0; b < 3; ++b) {
      trace.wind[b].push_back(u[b]);
      trace.moment[b].push_back(m[b]);
    }

    try {
      if (pin) {
        const BladeTriplet eps = residuals(model, omega_r, pin->estimates(), at, m);
        for (int b = 0; b < 3; ++b) trace.eps_pin[b].push_back(eps[b]);
        pin->step({eps.b1 / moment_scale, eps.b2 / moment_scale, eps.b3 / moment_scale}, omega_r,
                  scenario.dt_s);
        for (int b = 0; b < 3; ++b) trace.estimate_pin[b].push_back(pin->estimates()[b]);
      }
      if (coleman) {
        const BladeTriplet eps = residuals(model, omega_r, coleman->estimates(), at, m);
        for (int b = 0; b < 3; ++b) trace.eps_coleman[b].push_back(eps[b]);
        coleman->step({eps.b1 / moment_scale, eps.b2 / moment_scale, eps.b3 / moment_scale}, at,
                      scenario.dt_s);
        for (int b = 0; b < 3; ++b) trace.estimate_coleman[b].push_back(coleman->estimates()[b]);
      }
    } catch (const NonFinite& e) {
      throw NonFinite(std::string(e.what()) + " at step " + std::to_string(k) + " (t = " +
                      format_double(t) + " s)");
    }
  }

  if (pin) trace.pin_clamp_events = pin->clamp_events();
  if (coleman) trace.coleman_clamp_events = coleman->clamp_events();
  return trace;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  const bool both = trace.has_pin && trace.has_coleman;
  const std::string pin_suffix = both ? "_pin" : "";
  const std::string coleman_suffix = both ? "_coleman" : "";

  out << "t,psi,U1,U2,U3,m1,m2,m3";
  if (trace.has_pin)
    for (const char* name : {"eps1", "eps2", "eps3", "Uhat1", "Uhat2", "Uhat3"})
      out << "," << name << pin_suffix;
  if (trace.has_coleman)
    for (const char* name : {"eps1", "eps2", "eps3", "Uhat1", "Uhat2", "Uhat3"})
      out << "," << name << coleman_suffix;
  out << "\n";

  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << format_double(trace.t[k]) << "," << format_double(trace.psi[k]);
    for (int b = 0; b < 3; ++b) out << "," << format_double(trace.wind[b][k]);
    for (int b = 0; b < 3; ++b) out << "," << format_double(trace.moment[b][k]);
    if (trace.has_pin) {
      for (int b = 0; b < 3; ++b) out << "," << format_double(trace.eps_pin[b][k]);
      for (int b = 0; b < 3; ++b) out << "," << format_double(trace.estimate_pin[b][k]);
    }
    if (trace.has_coleman) {
      for (int b = 0; b < 3; ++b) out << "," << format_double(trace.eps_coleman[b][k]);
      for (int b = 0; b < 3; ++b) out << "," << format_double(trace.estimate_coleman[b][k]);
    }
    out << "\n";
  }
}

}  // namespace bews
