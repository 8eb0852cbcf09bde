#include "bews/coleman.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace bews {

namespace {
constexpr double kSpacing = 2.0 * std::numbers::pi / 3.0;
using Complex = std::complex<double>;
}

AzimuthTriplet::AzimuthTriplet(double rotor_azimuth)
    : psi1(rotor_azimuth), psi2(rotor_azimuth + kSpacing), psi3(rotor_azimuth + 2.0 * kSpacing) {}

Eigen::Matrix3d forward_coleman_matrix(const AzimuthTriplet& psi) {
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    t(0, i) = 1.0 / 3.0;
    t(1, i) = (2.0 / 3.0) * std::sin(psi[i]);
    t(2, i) = (2.0 / 3.0) * std::cos(psi[i]);
  }
  return t;
}

Eigen::Matrix3d inverse_coleman_matrix(const AzimuthTriplet& psi) {
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    t(i, 0) = 1.0;
    t(i, 1) = std::sin(psi[i]);
    t(i, 2) = std::cos(psi[i]);
  }
  return t;
}

NrfTriplet forward_coleman(const AzimuthTriplet& psi, const BladeTriplet& blades) {
  return NrfTriplet::from(forward_coleman_matrix(psi) * blades.vec());
}

BladeTriplet inverse_coleman(const AzimuthTriplet& psi, const NrfTriplet& nrf) {
  return BladeTriplet::from(inverse_coleman_matrix(psi) * nrf.vec());
}

DecompMatrices decomp_matrices() {
  const Complex j(0.0, 1.0);

  Eigen::Matrix3cd mixer_minus = Eigen::Matrix3cd::Zero();
  mixer_minus(1, 1) = 1.0;
  mixer_minus(1, 2) = j;
  mixer_minus(2, 1) = -j;
  mixer_minus(2, 2) = 1.0;

  Eigen::Matrix3cd trig = Eigen::Matrix3cd::Zero();
  for (int i = 0; i < 3; ++i) {
    trig(1, i) = std::cos(i * kSpacing);
    trig(2, i) = std::sin(i * kSpacing);
  }

  DecompMatrices d;
  d.Cminus = 0.5 * mixer_minus * trig;
  d.Cplus = d.Cminus.conjugate();
  d.Ccol = Eigen::Matrix3cd::Zero();
  d.Ccol.row(0).setOnes();
  return d;
}

Eigen::Matrix3d reconstruct_inverse_from_decomp(double rotor_azimuth) {
  const DecompMatrices d = decomp_matrices();
  const Complex rotor = std::exp(Complex(0.0, rotor_azimuth));

  Eigen::Matrix3cd rebuilt = d.Ccol.transpose() + rotor * d.Cminus.transpose() +
                             std::conj(rotor) * d.Cplus.transpose();

  // The proof's factor matrices order the modulated columns as (cos, sin)
  // while the inverse transformation rows read [1, sin, cos]; matching at
  // psi = 0 fixes the correction to a tilt/yaw column swap, modulation
  // scale 1.
  rebuilt.col(1).swap(rebuilt.col(2));

  const double imag_residue = rebuilt.imag().cwiseAbs().maxCoeff();
  if (imag_residue > 1e-12)
    throw ReconstructionMismatch("reconstruct_inverse_from_decomp: imaginary residue " +
                                 std::to_string(imag_residue));

  const Eigen::Matrix3d real_part = rebuilt.real();
  const double mismatch =
      (real_part - inverse_coleman_matrix(AzimuthTriplet(rotor_azimuth))).cwiseAbs().maxCoeff();
  if (mismatch > 1e-13)
    throw ReconstructionMismatch("reconstruct_inverse_from_decomp: deviation " +
                                 std::to_string(mismatch) + " from the inverse transformation");
  return real_part;
}

}  // namespace bews
