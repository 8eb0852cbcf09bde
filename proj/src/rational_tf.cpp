#include "bews/rational_tf.hpp"

#include <cmath>

namespace bews {

namespace {

Eigen::VectorXd trim_leading_zeros(const Eigen::VectorXd& c) {
  Eigen::Index first = 0;
  while (first < c.size() - 1 && c[first] == 0.0) ++first;
  return c.tail(c.size() - first);
}

Complex horner(const Eigen::VectorXd& coeffs, Complex s) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) acc = acc * s + coeffs[i];
  return acc;
}

double horner_abs(const Eigen::VectorXd& coeffs, double r) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) acc = acc * r + std::abs(coeffs[i]);
  return acc;
}

Eigen::VectorXd poly_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Eigen::VectorXd poly_sum(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = std::max(a.size(), b.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out.tail(a.size()) = a;
  out.tail(b.size()) += b;
  return out;
}

}  // namespace

RationalTf::RationalTf() : num_(Eigen::VectorXd::Zero(1)), den_(Eigen::VectorXd::Ones(1)) {}

RationalTf::RationalTf(Eigen::VectorXd num, Eigen::VectorXd den) {
  if (den.size() == 0 || den.isZero(0.0))
    throw std::invalid_argument("RationalTf: denominator must have a nonzero coefficient");
  if (num.size() == 0) num = Eigen::VectorXd::Zero(1);
  if (!num.allFinite() || !den.allFinite())
    throw std::invalid_argument("RationalTf: coefficients must be finite");
  num_ = trim_leading_zeros(num);
  den_ = trim_leading_zeros(den);
}

RationalTf RationalTf::zero() { return RationalTf(); }

RationalTf RationalTf::constant(double value) {
  return RationalTf(Eigen::VectorXd::Constant(1, value), Eigen::VectorXd::Ones(1));
}

RationalTf RationalTf::integrator(double gain) {
  Eigen::VectorXd den(2);
  den << 1.0, 0.0;
  return RationalTf(Eigen::VectorXd::Constant(1, gain), den);
}

Complex tf_eval(const RationalTf& tf, Complex s) {
  const Complex d = horner(tf.den(), s);
  const double scale = horner_abs(tf.den(), std::abs(s));
  if (std::abs(d) < 1e-300 * scale || scale == 0.0)
    throw NearPole("tf_eval: denominator vanishes at the requested frequency");
  return horner(tf.num(), s) / d;
}

std::vector<Complex> tf_poles(const RationalTf& tf) {
  const Eigen::VectorXd& den = tf.den();
  const Eigen::Index n = den.size() - 1;
  if (n == 0) return {};

  // Companion matrix of the monic denominator.
  const Eigen::VectorXd monic = den / den[0];
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) companion(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) companion(n - 1, j) = -monic[n - j];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("tf_poles: companion eigenvalue iteration failed");

  std::vector<Complex> roots(n);
  for (Eigen::Index i = 0; i < n; ++i) roots[i] = solver.eigenvalues()[i];
  return roots;
}

RationalTf tf_add(const RationalTf& a, const RationalTf& b) {
  const Eigen::VectorXd num = poly_sum(poly_mul(a.num(), b.den()), poly_mul(b.num(), a.den()));
  return RationalTf(num, poly_mul(a.den(), b.den()));
}

RationalTf tf_scale(const RationalTf& tf, double factor) {
  return RationalTf(factor * tf.num(), tf.den());
}

Eigen::Matrix3cd TfMatrix3::eval(Complex s) const {
  Eigen::Matrix3cd out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = tf_eval(entries[i][j], s);
  return out;
}

BodeGrid bode_mag(const TfMatrix3& tfm, const std::vector<double>& omega_grid) {
  std::vector<Complex> poles;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto p = tf_poles(tfm.entries[i][j]);
      poles.insert(poles.end(), p.begin(), p.end());
    }

  BodeGrid grid;
  for (double w : omega_grid) {
    const Complex s(0.0, w);
    bool near_pole = false;
    for (const Complex& p : poles) {
      if (std::abs(s - p) <= 1e-6 * std::max(std::abs(p), std::abs(w))) {
        near_pole = true;
        break;
      }
    }
    if (near_pole) {
      grid.filtered.push_back(w);
      continue;
    }
    grid.omega.push_back(w);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        grid.magnitude_db[i][j].push_back(20.0 * std::log10(std::abs(tf_eval(tfm.entries[i][j], s))));
  }
  return grid;
}

}  // namespace bews
