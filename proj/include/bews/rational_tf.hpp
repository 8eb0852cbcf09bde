#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

#include "bews/errors.hpp"

namespace bews {

using Complex = std::complex<double>;

/// Single-input single-output rational transfer function in the Laplace
/// variable, stored as real coefficient vectors in descending powers of s.
///
/// Arithmetic is exact polynomial cross-multiplication; common factors are
/// never cancelled, so the coefficient form of a sum stays faithful to the
/// formulas that produced it. Equality of two functions is checked by value
/// (tf_eval), not by coefficient form.
class RationalTf {
 public:
  RationalTf();  // the zero function 0/1
  RationalTf(Eigen::VectorXd num, Eigen::VectorXd den);

  static RationalTf zero();
  static RationalTf constant(double value);
  static RationalTf integrator(double gain);  // gain / s

  const Eigen::VectorXd& num() const { return num_; }
  const Eigen::VectorXd& den() const { return den_; }

  int num_degree() const { return static_cast<int>(num_.size()) - 1; }
  int den_degree() const { return static_cast<int>(den_.size()) - 1; }
  bool proper() const { return num_degree() <= den_degree(); }
  bool is_zero() const { return num_.size() == 1 && num_[0] == 0.0; }

 private:
  Eigen::VectorXd num_;  // leading zeros trimmed
  Eigen::VectorXd den_;  // leading zeros trimmed, at least one nonzero entry
};

/// num(s)/den(s) by Horner evaluation. Throws NearPole when |den(s)| is
/// vanishing relative to the magnitude-wise evaluation of den at |s|.
Complex tf_eval(const RationalTf& tf, Complex s);

/// Roots of the denominator via the companion-matrix eigenproblem.
std::vector<Complex> tf_poles(const RationalTf& tf);

/// Exact cross-multiplied sum; no cancellation (1/s + 1/s -> 2s/s^2).
RationalTf tf_add(const RationalTf& a, const RationalTf& b);

/// factor * tf (numerator scaling).
RationalTf tf_scale(const RationalTf& tf, double factor);

/// 3x3 matrix of rational transfer functions.
struct TfMatrix3 {
  std::array<std::array<RationalTf, 3>, 3> entries;

  /// Entrywise evaluation; throws NearPole at a pole of any entry.
  Eigen::Matrix3cd eval(Complex s) const;
};

/// Bode magnitude data over a frequency grid with pole-adjacent points
/// removed instead of reported as +-inf.
struct BodeGrid {
  std::vector<double> omega;     // surviving frequencies, rad/s
  std::vector<double> filtered;  // grid points dropped near poles
  std::array<std::array<std::vector<double>, 3>, 3> magnitude_db;
};

/// 20*log10|entry(j*omega)| per entry per surviving frequency. A grid point
/// is dropped when it lies within 1e-6 relative distance of any pole of any
/// entry.
BodeGrid bode_mag(const TfMatrix3& tfm, const std::vector<double>& omega_grid);

}  // namespace bews
