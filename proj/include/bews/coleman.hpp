#pragma once

#include <Eigen/Dense>

#include "bews/errors.hpp"

namespace bews {

/// Azimuth angles of the three equally spaced blades, radians.
/// Constructed from the rotor azimuth; blade spacing is fixed at +2*pi/3 in
/// index order, which matches the row pattern of the inverse transformation.
struct AzimuthTriplet {
  double psi1 = 0.0;
  double psi2 = 0.0;
  double psi3 = 0.0;

  explicit AzimuthTriplet(double rotor_azimuth);

  double operator[](int blade) const {  // blade in {0,1,2}
    return blade == 0 ? psi1 : (blade == 1 ? psi2 : psi3);
  }
};

/// Per-blade (rotating frame) signal samples. Units depend on use:
/// Nm for moments and residuals, m/s for wind speeds.
struct BladeTriplet {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;

  Eigen::Vector3d vec() const { return {b1, b2, b3}; }
  static BladeTriplet from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
  double operator[](int blade) const { return blade == 0 ? b1 : (blade == 1 ? b2 : b3); }
};

/// Collective / tilt / yaw (non-rotating frame) signal samples.
struct NrfTriplet {
  double col = 0.0;
  double tilt = 0.0;
  double yaw = 0.0;

  Eigen::Vector3d vec() const { return {col, tilt, yaw}; }
  static NrfTriplet from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Forward Coleman matrix T_cm(psi): rows (2/3)*[1/2 ...], (2/3)*[sin psi_i],
/// (2/3)*[cos psi_i].
Eigen::Matrix3d forward_coleman_matrix(const AzimuthTriplet& psi);

/// Inverse Coleman matrix, rows [1, sin psi_i, cos psi_i].
Eigen::Matrix3d inverse_coleman_matrix(const AzimuthTriplet& psi);

NrfTriplet forward_coleman(const AzimuthTriplet& psi, const BladeTriplet& blades);
BladeTriplet inverse_coleman(const AzimuthTriplet& psi, const NrfTriplet& nrf);

/// Complex decomposition matrices of the frequency-shift lifting of the
/// Coleman transformations. Cplus is the entrywise conjugate of Cminus, and
/// all six transpose products among {Cminus, Cplus, Ccol} vanish.
struct DecompMatrices {
  Eigen::Matrix3cd Cminus;
  Eigen::Matrix3cd Cplus;
  Eigen::Matrix3cd Ccol;
};

DecompMatrices decomp_matrices();

/// Rebuilds the inverse Coleman matrix from the complex decomposition:
/// Ccol^T + e^{+j psi} Cminus^T + e^{-j psi} Cplus^T, composed with the
/// tilt/yaw column swap fixed by matching at psi = 0. Throws
/// ReconstructionMismatch when the imaginary residue exceeds 1e-12 or the
/// real part deviates from inverse_coleman_matrix by more than 1e-13.
Eigen::Matrix3d reconstruct_inverse_from_decomp(double rotor_azimuth);

}  // namespace bews
