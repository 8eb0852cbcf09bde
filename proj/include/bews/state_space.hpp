#pragma once

#include <Eigen/Dense>

#include "bews/rational_tf.hpp"

namespace bews {

/// Minimal continuous-time SISO state-space realization used for
/// time-domain integration of the estimator transfer functions.
struct StateSpaceSiso {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;

  int order() const { return static_cast<int>(A.rows()); }
  Eigen::VectorXd zero_state() const { return Eigen::VectorXd::Zero(order()); }

  /// C (sI - A)^{-1} B + D; round-trip check against tf_eval.
  Complex eval(Complex s) const;
};

/// Controllable canonical realization. Throws ImproperTf when the numerator
/// degree exceeds the denominator degree.
StateSpaceSiso realize(const RationalTf& tf);

struct StepResult {
  Eigen::VectorXd state;
  double output = 0.0;
};

/// One fixed-step RK4 advance of xdot = A x + B u with u held over the step
/// (zero-order hold); output y = C x + D u at the new state. Exact for the
/// pure integrator under constant input. Recommended dt * max|eig(A)| < 0.1.
StepResult step_state(const StateSpaceSiso& ss, const Eigen::VectorXd& state, double input,
                      double dt);

}  // namespace bews
