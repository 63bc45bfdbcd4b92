#pragma once

// Charts of S^3, geodesic distances on SU(2) and SO(3), and the quotient
// projection S^3 -> RP^3.
//
// The primary angle variable is eta, half of the rotation angle psi.

#include <Eigen/Core>

#include "spinsphere/ga.hpp"

namespace spinsphere {

struct ChartPoint {
  double chi = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d vec() const { return {chi, theta, phi}; }
  static ChartPoint from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Point of the unit 3-sphere in the round (hyperspherical) chart.
struct RoundPoint {
  Eigen::Vector4d Y;
  ChartPoint chart;
};

struct DistanceSample {
  double eta;
  double su2;
  double so3;
};

RoundPoint embed_round(double chi, double theta, double phi);

/// Analytic Jacobian dY/d(chi, theta, phi), columns in that order.
Eigen::Matrix<double, 4, 3> embed_round_jacobian(const ChartPoint& x);

/// dchi^2 + sin^2 chi (dtheta^2 + sin^2 theta dphi^2).
double frw_line_element(double chi, double theta, double phi, double dchi,
                        double dtheta, double dphi);

/// dr^2 / (1 - r^2) with r = sin chi; diverges as r -> 1.
double frw_radial_line_element(double r, double dr);

/// q = Y0 + Y1 e23 + Y2 e31 + Y3 e12.
Rotord round_to_flat(const RoundPoint& Y);
Eigen::Vector4d flat_to_round(const Rotord& q);

/// Angle in [0, pi/2] with cos(eta) = |<q_a q_b^dagger>_0|.
double rotor_angle(const Rotord& qa, const Rotord& qb);

double su2_distance(double eta);
double so3_distance(double eta);
double so3_distance_rotors(const Rotord& qa, const Rotord& qb);

/// Projects the S^3 arc measure onto RP^3, folding at the double cover.
double quotient_project(double eta);

/// Exponential-map parameter t_a(psi), psi in [0, 4 pi].
double so3_exp_parameter(double psi);

/// Sign of det(omega): +1 or -1.
int basis_orientation(const Eigen::Matrix4d& omega);

/// Angle between two nonzero 3-vectors, in [0, pi].
double vector_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

DistanceSample distance_sample(double eta);

/// The SO(3) metric J through its induced inner product and algebra.
///
/// J_{mu nu} a_mu b_nu = cos(alpha_ab), where -cos(alpha_ab) follows the
/// piecewise law of so3_distance evaluated at the angle between a and b.
class SO3Metric {
 public:
  double inner(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;

  /// xi(a) xi(b) = -J(a, b) - xi(a x b), represented in the beta basis.
  Multivectord product(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;
};

}  // namespace spinsphere
