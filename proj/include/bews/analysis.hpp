#pragma once

#include <Eigen/Dense>

#include <ostream>
#include <vector>

#include "bews/estimators.hpp"
#include "bews/rational_tf.hpp"
#include "bews/sim.hpp"

namespace bews {

/// Least-squares fit of samples against sin/cos pairs at the given
/// frequencies plus a constant column.
struct SineFitComponent {
  double a_sin = 0.0;
  double b_cos = 0.0;
  double amplitude() const;
  /// Phasor of the component for an input convention A*sin(w t): a + j b.
  Complex phasor() const;
};

struct SineFitResult {
  std::vector<SineFitComponent> components;  // one per requested frequency
  double dc = 0.0;
  double rms_residual = 0.0;
};

SineFitResult fit_sinusoids(const std::vector<double>& t, const std::vector<double>& y,
                            const std::vector<double>& omegas);

/// One identified point of the Coleman estimator frequency response,
/// paired with the closed-form reference.
struct FreqResponseSample {
  double omega = 0.0;
  Eigen::Matrix3cd identified;
  Eigen::Matrix3cd reference;

  double max_magnitude_error_rel() const;
  double max_phase_error_deg() const;
};

struct IdentificationOptions {
  double amplitude = 1.0;
  int cycles = 20;          // fitted cycles after the discard window
  int discard_cycles = 10;
  int steps_per_cycle = 256;  // of the fastest of (omega, omega0)
  double pole_exclusion_rel = 1e-3;
  double residual_limit_rel = 0.05;
};

/// Sinusoid-injection identification of the OPEN-LOOP time-domain Coleman
/// estimator (transform - integrate - transform, no turbine, no feedback
/// sign) at constant rotor speed omega0. Each input channel is driven with
/// A*sin(w t), the outputs are sine-fitted at w with DC and omega0 nuisance
/// regressors, and column j of H(jw) is assembled from channel j. Throws
/// FitResidualTooLarge when the fit residual exceeds the limit and
/// std::invalid_argument when a frequency violates the pole exclusion.
std::vector<FreqResponseSample> identify_coleman_response(const EstimatorGains& gains,
                                                          double omega0,
                                                          const std::vector<double>& test_freqs,
                                                          const IdentificationOptions& options = {});

/// Log-spaced identification grid over [0.05, 5]*omega0.
std::vector<double> identification_grid(double omega0, int count = 20);

struct Theorem1Result {
  double max_rel_error = 0.0;
  double worst_omega = 0.0;
  int grid_points = 0;
};

/// Max over a log grid [1e-3, 1e2]*omega0 (pole neighborhoods excluded at
/// 1e-6 relative) of |K(jw) - K_Ra(jw)| / |K_Ra(jw)| using the gain set's
/// (k_p, k_i) as given.
Theorem1Result verify_theorem1(const EstimatorGains& gains, double omega0, int grid_size = 1000);

struct ErrorMetrics {
  Eigen::Vector3d rmse = Eigen::Vector3d::Zero();                  // m/s, post-settling window
  Eigen::Vector3d one_p_amplitude_error = Eigen::Vector3d::Zero(); // relative, at 1P
  double settling_time_s = 0.0;  // first time the 1% band holds to the end
  long clamp_events = 0;
};

/// Metrics over the final metrics_window_revs revolutions of the trace.
ErrorMetrics compute_metrics(const Trace& trace, bool coleman, double omega_r,
                             double metrics_window_revs = 10.0);

struct ComparisonResult {
  ErrorMetrics pin;
  ErrorMetrics coleman;
};

/// Runs both estimators on one wind realization and computes paired
/// metrics. The scenario's estimator selection is overridden to Both.
ComparisonResult compare_estimators(const Scenario& scenario, double metrics_window_revs = 10.0);

struct BodeExportOptions {
  bool diagonal_only = false;
};

/// CSV rows (omega_rad_s,row,col,magnitude_db,at_omega0), pole-filtered;
/// at_omega0 marks the kept frequency closest to omega0.
void export_bode(const TfMatrix3& tfm, const std::vector<double>& grid, double omega0,
                 std::ostream& out, const BodeExportOptions& options = {});

/// Log grid [1e-2, 1e2]*omega0 plus near-1P points at relative offsets
/// 1e-5..1e-3 so the resonance peak is resolved.
std::vector<double> default_bode_grid(double omega0, int points = 400);

}  // namespace bews
