#pragma once

// Global tangent frame of S^3, the Weitzenbock connection it induces, and
// finite-difference checks that its curvature vanishes while its torsion
// does not.
//
// Index layout. Chart coordinates x^mu = (chi, theta, phi). The frame is
// carried in chart components as the 3x3 matrix E with E(a, nu) = e^a_nu,
// obtained by projecting the coordinate tangent vectors dY/dx^nu onto the
// embedding frame rows beta_a(q). Then
//   Omega^mu_{nu alpha} = e_a^mu d_nu e^a_alpha      (Omega_nu = E^-1 d_nu E)
//   T^sigma_{mu nu}     = Omega^sigma_{mu nu} - Omega^sigma_{nu mu}
//   R^sigma_{alpha mu nu} = (d_mu Omega_nu - d_nu Omega_mu
//                            + Omega_mu Omega_nu - Omega_nu Omega_mu)(sigma, alpha)

#include <array>

#include <Eigen/Core>

#include "spinsphere/ga.hpp"
#include "spinsphere/sphere_geometry.hpp"

namespace spinsphere {

inline constexpr double kChartCollar = 0.1;
inline constexpr double kDefaultStep = 1e-4;

struct TangentFrame {
  /// Rows beta_1(q), beta_2(q), beta_3(q) as 4-vectors.
  Eigen::Matrix<double, 3, 4> rows;
  Rotord base;

  /// Row mu as an even-grade element.
  Rotord row_rotor(int mu) const { return Rotord(Eigen::Vector4d(rows.row(mu).transpose())); }
};

/// omega[nu](mu, alpha) = Omega^mu_{nu alpha}.
struct ConnectionCoefficients {
  std::array<Eigen::Matrix3d, 3> omega;

  double operator()(int mu, int nu, int alpha) const { return omega[nu](mu, alpha); }
};

/// components[sigma](mu, nu) = T^sigma_{mu nu}.
struct TorsionTensor {
  std::array<Eigen::Matrix3d, 3> components;

  double operator()(int sigma, int mu, int nu) const {
    return components[sigma](mu, nu);
  }
  double max_abs() const;
};

/// components[mu][nu](sigma, alpha) = R^sigma_{alpha mu nu}.
struct CurvatureTensor {
  std::array<std::array<Eigen::Matrix3d, 3>, 3> components;

  double operator()(int sigma, int alpha, int mu, int nu) const {
    return components[mu][nu](sigma, alpha);
  }
  double max_abs() const;
};

TangentFrame tangent_frame(const Rotord& q);

/// Carries a frame at q to p by right multiplication of every row with
/// q^dagger p; the result is the frame at p.
TangentFrame frame_transport(const TangentFrame& frame_at_q, const Rotord& p);

/// Gram matrix of the frame rows.
Eigen::Matrix3d flat_metric(const TangentFrame& frame);

/// Rows of the 3x4 embedding frame times its transpose (the 4x3
/// pseudo-inverse); identity for an orthonormal frame.
Eigen::Matrix3d frame_reciprocity(const TangentFrame& frame);

/// E(a, nu) = beta_a(q(x)) . dY/dx^nu.
Eigen::Matrix3d chart_frame(const ChartPoint& x);

/// Throws ChartDegeneracy within the collar around chi in {0, pi} or
/// theta in {0, pi}; StepOutOfRange unless h in [1e-6, 1e-3].
void check_admissible(const ChartPoint& x, double h);

ConnectionCoefficients weitzenbock_connection(const ChartPoint& x,
                                              double h = kDefaultStep);
CurvatureTensor curvature_tensor(const ChartPoint& x, double h = kDefaultStep);
TorsionTensor torsion_tensor(const ChartPoint& x, double h = kDefaultStep);

/// Torsion with all indices in the frame: T^a_{bc} = e^a_sigma T^sigma_{mu nu}
/// e_b^mu e_c^nu. For the quaternionic frame this is -2 eps_{abc}.
TorsionTensor frame_torsion(const ChartPoint& x, double h = kDefaultStep);

/// Sectional curvature of the round metric in the (chi, theta) plane, from
/// finite-difference Levi-Civita Christoffel symbols. The round 3-sphere
/// has K = +1; used as a negative control for the flat connection.
double round_metric_sectional_curvature(const ChartPoint& x,
                                        double h = kDefaultStep);

/// a ^ b = beta(a x b) = beta(c) sin(eta_ab). Zero for parallel axes.
Bivectord torsion_bivector_su2(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Piecewise-linear magnitude of the RP^3 torsion as a function of eta.
double so3_torsion_magnitude(double eta);

/// beta(c) times so3_torsion_magnitude(eta_ab). Zero for parallel axes.
Bivectord torsion_bivector_so3(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct TorsionCheck {
  ChartPoint point;
  double max_abs_curvature;
  double max_abs_torsion;
  double h;
};

TorsionCheck torsion_check(const ChartPoint& x, double h = kDefaultStep);

}  // namespace spinsphere
