#include "bews/state_space.hpp"

namespace bews {

Complex StateSpaceSiso::eval(Complex s) const {
  if (order() == 0) return D;
  Eigen::MatrixXcd resolvent = s * Eigen::MatrixXcd::Identity(order(), order()) - A.cast<Complex>();
  Eigen::VectorXcd x = resolvent.partialPivLu().solve(B.cast<Complex>());
  return (C.cast<Complex>() * x).value() + D;
}

StateSpaceSiso realize(const RationalTf& tf) {
  if (!tf.proper())
    throw ImproperTf("realize: numerator degree exceeds denominator degree");

  const int n = tf.den_degree();
  const Eigen::VectorXd a = tf.den() / tf.den()[0];
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b.tail(tf.num().size()) = tf.num() / tf.den()[0];

  StateSpaceSiso ss;
  ss.D = b[0];
  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.B = Eigen::VectorXd::Zero(n);
  ss.C = Eigen::RowVectorXd::Zero(n);
  if (n == 0) return ss;

  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) ss.A(n - 1, j) = -a[n - j];
  ss.B[n - 1] = 1.0;
  for (int i = 1; i <= n; ++i) ss.C[n - i] = b[i] - a[i] * ss.D;
  return ss;
}

StepResult step_state(const StateSpaceSiso& ss, const Eigen::VectorXd& state, double input,
                      double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_state: dt must be positive");
  if (state.size() != ss.order())
    throw std::invalid_argument("step_state: state dimension mismatch");

  const Eigen::VectorXd bu = ss.B * input;
  const Eigen::VectorXd k1 = ss.A * state + bu;
  const Eigen::VectorXd k2 = ss.A * (state + 0.5 * dt * k1) + bu;
  const Eigen::VectorXd k3 = ss.A * (state + 0.5 * dt * k2) + bu;
  const Eigen::VectorXd k4 = ss.A * (state + dt * k3) + bu;

  StepResult result;
  result.state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!result.state.allFinite())
    throw NonFinite("step_state: state became non-finite (instability or bad dt)");
  result.output = (ss.order() ? (ss.C * result.state).value() : 0.0) + ss.D * input;
  return result;
}

}  // namespace bews
