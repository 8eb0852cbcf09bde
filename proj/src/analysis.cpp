#include "bews/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bews/num_format.hpp"

namespace bews {

namespace {
constexpr double kPi = std::numbers::pi;
}

double SineFitComponent::amplitude() const { return std::hypot(a_sin, b_cos); }

Complex SineFitComponent::phasor() const { return {a_sin, b_cos}; }

SineFitResult fit_sinusoids(const std::vector<double>& t, const std::vector<double>& y,
                            const std::vector<double>& omegas) {
  if (t.size() != y.size() || t.size() < 2 * omegas.size() + 1)
    throw std::invalid_argument("fit_sinusoids: not enough samples");

  const Eigen::Index rows = static_cast<Eigen::Index>(t.size());
  const Eigen::Index cols = 1 + 2 * static_cast<Eigen::Index>(omegas.size());
  Eigen::MatrixXd design(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    design(r, 0) = 1.0;
    for (std::size_t f = 0; f < omegas.size(); ++f) {
      design(r, 1 + 2 * f) = std::sin(omegas[f] * t[r]);
      design(r, 2 + 2 * f) = std::cos(omegas[f] * t[r]);
    }
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), rows);
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(rhs);

  SineFitResult result;
  result.dc = beta[0];
  for (std::size_t f = 0; f < omegas.size(); ++f)
    result.components.push_back({beta[1 + 2 * f], beta[2 + 2 * f]});
  result.rms_residual = std::sqrt((design * beta - rhs).squaredNorm() / static_cast<double>(rows));
  return result;
}

double FreqResponseSample::max_magnitude_error_rel() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double ref = std::abs(reference(i, j));
      worst = std::max(worst, std::abs(std::abs(identified(i, j)) - ref) / ref);
    }
  return worst;
}

double FreqResponseSample::max_phase_error_deg() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double d = std::arg(identified(i, j)) - std::arg(reference(i, j));
      while (d > kPi) d -= 2.0 * kPi;
      while (d < -kPi) d += 2.0 * kPi;
      worst = std::max(worst, std::abs(d) * 180.0 / kPi);
    }
  return worst;
}

namespace {

// Identified response column: drive one input channel with A sin(w t)
// through the raw transform-integrate-transform path and sine-fit the three
// outputs. The integrators never forget their startup constants (poles on
// the axis), so the fit carries DC and omega0 nuisance regressors instead
// of waiting for a decay that does not happen.
Eigen::Vector3cd identify_column(const EstimatorGains& gains, double omega0, double omega,
                                 int channel, const IdentificationOptions& opt) {
  ColemanEstimator estimator(gains.K_col, gains.K_0, 0.0, ClampLimits{}, +1.0);

  const double period = 2.0 * kPi / omega;
  const double dt = 2.0 * kPi / ((omega + omega0) * opt.steps_per_cycle);

  // Near omega0 the fit window must resolve the beat between the test
  // frequency and the nuisance frequency.
  int fit_cycles = opt.cycles;
  const double separation = std::abs(omega - omega0);
  if (separation > 0.0)
    fit_cycles = std::max(fit_cycles,
                          std::min(400, static_cast<int>(std::ceil(2.0 * omega / separation))));

  const double t_start = opt.discard_cycles * period;
  const double t_end = t_start + fit_cycles * period;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));

  std::vector<double> times;
  std::array<std::vector<double>, 3> outputs;
  times.reserve(steps);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    BladeTriplet input{};
    const double u = opt.amplitude * std::sin(omega * t_mid);
    (channel == 0 ? input.b1 : channel == 1 ? input.b2 : input.b3) = u;
    estimator.drive(input, AzimuthTriplet(omega0 * t_mid), dt);

    const double t_next = static_cast<double>(k + 1) * dt;
    if (t_next >= t_start) {
      const BladeTriplet y = estimator.project(AzimuthTriplet(omega0 * t_next));
      times.push_back(t_next);
      for (int b = 0; b < 3; ++b) outputs[b].push_back(y[b]);
    }
  }

  Eigen::Vector3cd column;
  for (int b = 0; b < 3; ++b) {
    const SineFitResult fit = fit_sinusoids(times, outputs[b], {omega, omega0});
    const double signal_rms = fit.components[0].amplitude() / std::sqrt(2.0);
    if (fit.rms_residual > opt.residual_limit_rel * signal_rms)
      throw FitResidualTooLarge("identification: residual " + format_double(fit.rms_residual) +
                                " vs signal rms " + format_double(signal_rms) + " at omega = " +
                                format_double(omega));
    column[b] = fit.components[0].phasor() / opt.amplitude;
  }
  return column;
}

}  // namespace

std::vector<FreqResponseSample> identify_coleman_response(const EstimatorGains& gains,
                                                          double omega0,
                                                          const std::vector<double>& test_freqs,
                                                          const IdentificationOptions& options) {
  const TfMatrix3 reference = build_c_col(gains, omega0);

  std::vector<FreqResponseSample> samples;
  samples.reserve(test_freqs.size());
  for (double omega : test_freqs) {
    if (!(omega > 0.0) || omega < options.pole_exclusion_rel * omega0 ||
        std::abs(omega - omega0) < options.pole_exclusion_rel * omega0)
      throw std::invalid_argument("identification: omega = " + format_double(omega) +
                                  " violates the pole exclusion around {0, omega0}");

    FreqResponseSample sample;
    sample.omega = omega;
    for (int j = 0; j < 3; ++j)
      sample.identified.col(j) = identify_column(gains, omega0, omega, j, options);
    sample.reference = reference.eval(Complex(0.0, omega));
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::vector<double> identification_grid(double omega0, int count) {
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i)
    grid[i] = 0.05 * omega0 * std::pow(100.0, static_cast<double>(i) / (count - 1));
  return grid;
}

Theorem1Result verify_theorem1(const EstimatorGains& gains, double omega0, int grid_size) {
  const RationalTf pin = pin_transfer_function(gains.k_p, gains.k_i, omega0);
  const RationalTf lifted_diagonal = build_c_col(gains, omega0).entries[0][0];

  Theorem1Result result;
  for (int i = 0; i < grid_size; ++i) {
    const double omega =
        1e-3 * omega0 * std::pow(1e5, static_cast<double>(i) / (grid_size - 1));
    if (std::abs(omega - omega0) <= 1e-6 * omega0) continue;  // pole neighborhood
    const Complex s(0.0, omega);
    const Complex reference = tf_eval(lifted_diagonal, s);
    const double err = std::abs(tf_eval(pin, s) - reference) / std::abs(reference);
    ++result.grid_points;
    if (err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_omega = omega;
    }
  }
  return result;
}

namespace {

Eigen::Vector3d window_rmse(const std::array<std::vector<double>, 3>& estimate,
                            const std::array<std::vector<double>, 3>& truth, std::size_t begin) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  const std::size_t n = truth[0].size() - begin;
  for (int b = 0; b < 3; ++b) {
    double acc = 0.0;
    for (std::size_t k = begin; k < truth[b].size(); ++k) {
      const double d = estimate[b][k] - truth[b][k];
      acc += d * d;
    }
    out[b] = std::sqrt(acc / static_cast<double>(n));
  }
  return out;
}

double settling_time(const Trace& trace, const std::array<std::vector<double>, 3>& estimate) {
  // Last sample violating the 1% relative band, then the next time stamp.
  std::ptrdiff_t last_bad = -1;
  for (std::size_t k = 0; k < trace.size(); ++k)
    for (int b = 0; b < 3; ++b) {
      const double rel = std::abs(estimate[b][k] - trace.wind[b][k]) / trace.wind[b][k];
      if (rel >= 0.01) {
        last_bad = static_cast<std::ptrdiff_t>(k);
        break;
      }
    }
  if (last_bad < 0) return 0.0;
  const auto next = static_cast<std::size_t>(last_bad) + 1;
  return next < trace.size() ? trace.t[next] : trace.t.back() + (trace.t[1] - trace.t[0]);
}

}  // namespace

ErrorMetrics compute_metrics(const Trace& trace, bool coleman, double omega_r,
                             double metrics_window_revs) {
  const auto& estimate = coleman ? trace.estimate_coleman : trace.estimate_pin;
  if ((coleman && !trace.has_coleman) || (!coleman && !trace.has_pin))
    throw std::invalid_argument("compute_metrics: estimator not present in trace");
  if (trace.size() < 4) throw std::invalid_argument("compute_metrics: trace too short");

  const double window_s = metrics_window_revs * 2.0 * kPi / omega_r;
  const double t_begin = std::max(0.0, trace.t.back() - window_s);
  std::size_t begin = 0;
  while (begin + 1 < trace.size() && trace.t[begin] < t_begin) ++begin;

  ErrorMetrics metrics;
  metrics.clamp_events = coleman ? trace.coleman_clamp_events : trace.pin_clamp_events;
  metrics.rmse = window_rmse(estimate, trace.wind, begin);
  metrics.settling_time_s = settling_time(trace, estimate);

  // 1P amplitude error per blade: sine fits of estimate and truth at the
  // rotor frequency over the window, relative mismatch of the amplitudes.
  std::vector<double> times(trace.t.begin() + begin, trace.t.end());
  for (int b = 0; b < 3; ++b) {
    std::vector<double> est(estimate[b].begin() + begin, estimate[b].end());
    std::vector<double> tru(trace.wind[b].begin() + begin, trace.wind[b].end());
    const double est_amp = fit_sinusoids(times, est, {omega_r}).components[0].amplitude();
    const SineFitResult truth_fit = fit_sinusoids(times, tru, {omega_r});
    const double tru_amp = truth_fit.components[0].amplitude();
    metrics.one_p_amplitude_error[b] =
        std::abs(est_amp - tru_amp) / std::max(tru_amp, 1e-9 * std::abs(truth_fit.dc));
  }
  return metrics;
}

ComparisonResult compare_estimators(const Scenario& scenario, double metrics_window_revs) {
  Scenario paired = scenario;
  paired.estimator = EstimatorKind::Both;
  const Trace trace = run(paired);
  const double omega_r = paired.rotor.rotor_speed_rad_s;
  return {compute_metrics(trace, false, omega_r, metrics_window_revs),
          compute_metrics(trace, true, omega_r, metrics_window_revs)};
}

void export_bode(const TfMatrix3& tfm, const std::vector<double>& grid, double omega0,
                 std::ostream& out, const BodeExportOptions& options) {
  const BodeGrid bode = bode_mag(tfm, grid);

  double marker = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double w : bode.omega) {
    const double d = std::abs(w - omega0);
    if (d < best) {
      best = d;
      marker = w;
    }
  }

  out << "omega_rad_s,row,col,magnitude_db,at_omega0\n";
  for (std::size_t k = 0; k < bode.omega.size(); ++k) {
    const double w = bode.omega[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (options.diagonal_only && i != j) continue;
        out << format_double(w) << "," << i + 1 << "," << j + 1 << ","
            << format_double(bode.magnitude_db[i][j][k]) << "," << (w == marker ? 1 : 0) << "\n";
      }
  }
}

std::vector<double> default_bode_grid(double omega0, int points) {
  if (points < 1) throw std::invalid_argument("default_bode_grid: need at least one point");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = points == 1
                  ? 1e-2 * omega0
                  : 1e-2 * omega0 * std::pow(1e4, static_cast<double>(i) / (points - 1));
  // Peak-resolving points near the 1P line, only for grids meant as sweeps.
  if (points >= 10)
    for (double off : {1e-5, 1e-4, 3e-4, 1e-3})
      for (double sign : {-1.0, 1.0}) grid.push_back(omega0 * (1.0 + sign * off));
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace bews
