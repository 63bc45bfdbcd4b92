#include "spinsphere/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace spinsphere {
namespace {

constexpr double kPi = M_PI;
// Slack for grid endpoints computed as deg * pi / 180.
constexpr double kDomainSlack = 1e-12;

double checked_eta(double eta, const char* who) {
  if (!(eta >= -kDomainSlack && eta <= 2.0 * kPi + kDomainSlack)) {
    throw Error(ErrorCode::kDomainError,
                std::string(who) + ": eta outside [0, 2 pi]");
  }
  return std::clamp(eta, 0.0, 2.0 * kPi);
}

}  // namespace

RoundPoint embed_round(double chi, double theta, double phi) {
  const double sc = std::sin(chi);
  RoundPoint p;
  p.Y << std::cos(chi), sc * std::sin(theta) * std::cos(phi),
      sc * std::sin(theta) * std::sin(phi), sc * std::cos(theta);
  p.chart = {chi, theta, phi};
  return p;
}

Eigen::Matrix<double, 4, 3> embed_round_jacobian(const ChartPoint& x) {
  const double sc = std::sin(x.chi), cc = std::cos(x.chi);
  const double st = std::sin(x.theta), ct = std::cos(x.theta);
  const double sp = std::sin(x.phi), cp = std::cos(x.phi);
  Eigen::Matrix<double, 4, 3> J;
  J << -sc, 0.0, 0.0,
       cc * st * cp, sc * ct * cp, -sc * st * sp,
       cc * st * sp, sc * ct * sp, sc * st * cp,
       cc * ct, -sc * st, 0.0;
  return J;
}

double frw_line_element(double chi, double theta, double /*phi*/, double dchi,
                        double dtheta, double dphi) {
  const double sc = std::sin(chi), st = std::sin(theta);
  return dchi * dchi + sc * sc * (dtheta * dtheta + st * st * dphi * dphi);
}

double frw_radial_line_element(double r, double dr) {
  if (!(std::abs(r) < 1.0)) {
    throw Error(ErrorCode::kDomainError,
                "frw_radial_line_element: chart singular at |r| >= 1");
  }
  return dr * dr / (1.0 - r * r);
}

Rotord round_to_flat(const RoundPoint& Y) { return Rotord(Y.Y); }

Eigen::Vector4d flat_to_round(const Rotord& q) { return q.coeffs(); }

double rotor_angle(const Rotord& qa, const Rotord& qb) {
  // <q_a q_b^dagger>_0 is the Euclidean dot product of the 4-vectors.
  const Rotord relative = qa * qb.reversed();
  return std::atan2(relative.bivector().norm(), std::abs(relative.scalar()));
}

double su2_distance(double eta) {
  return -std::cos(checked_eta(eta, "su2_distance"));
}

double so3_distance(double eta) {
  eta = checked_eta(eta, "so3_distance");
  if (eta <= kPi) return -1.0 + 2.0 * eta / kPi;
  return 3.0 - 2.0 * eta / kPi;
}

double quotient_project(double eta) {
  eta = checked_eta(eta, "quotient_project");
  // pi * int_0^eta sin -> int_0^{2 eta} d(alpha), normalized by pi and folded
  // back at eta = pi where the two sheets of the cover meet.
  const double folded = eta <= kPi ? eta : 2.0 * kPi - eta;
  const double projected_arc = 2.0 * folded;
  return -1.0 + projected_arc / kPi;
}

double so3_exp_parameter(double psi) {
  if (!(psi >= -kDomainSlack && psi <= 4.0 * kPi + kDomainSlack)) {
    throw Error(ErrorCode::kDomainError, "so3_exp_parameter: psi outside [0, 4 pi]");
  }
  psi = std::clamp(psi, 0.0, 4.0 * kPi);
  if (psi <= 2.0 * kPi) return -1.0 + psi / kPi;
  return 3.0 - psi / kPi;
}

double so3_distance_rotors(const Rotord& qa, const Rotord& qb) {
  const Rotord relative = qa * qb.reversed();
  const auto log = rotor_log(relative);
  const double psi = 2.0 * log.half_angle;  // in [0, 2 pi]
  return so3_exp_parameter(psi);
}

int basis_orientation(const Eigen::Matrix4d& omega) {
  const double det = omega.determinant();
  if (std::abs(det) < 1e-12) {
    throw Error(ErrorCode::kSingularMatrix, "basis_orientation: |det| < 1e-12");
  }
  return det > 0.0 ? +1 : -1;
}

double vector_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

DistanceSample distance_sample(double eta) {
  return {eta, su2_distance(eta), so3_distance(eta)};
}

double SO3Metric::inner(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
  const double scale = a.norm() * b.norm();
  if (scale == 0.0) return 0.0;
  return -so3_distance(vector_angle(a, b)) * scale;
}

Multivectord SO3Metric::product(const Eigen::Vector3d& a,
                                const Eigen::Vector3d& b) const {
  Multivectord out = Multivectord::FromBivector(-a.cross(b));
  out.coeffs()[0] = -inner(a, b);
  return out;
}

}  // namespace spinsphere
