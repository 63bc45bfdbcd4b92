#include "spinsphere/parallelization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

namespace spinsphere {
namespace {

constexpr double kPi = M_PI;

using Mat3 = Eigen::Matrix3d;
using Connection = std::array<Mat3, 3>;

ChartPoint shifted(const ChartPoint& x, int axis, double delta) {
  Eigen::Vector3d v = x.vec();
  v[axis] += delta;
  return ChartPoint::from(v);
}

// Fourth-order central difference of f along `axis`.
template <typename F>
auto central_derivative(F&& f, const ChartPoint& x, int axis, double h) {
  return (8.0 * (f(shifted(x, axis, h)) - f(shifted(x, axis, -h))) -
          (f(shifted(x, axis, 2.0 * h)) - f(shifted(x, axis, -2.0 * h)))) /
         (12.0 * h);
}

Connection connection_at(const ChartPoint& x, double h) {
  const Mat3 E = chart_frame(x);
  const Mat3 E_inv = E.inverse();
  Connection omega;
  for (int nu = 0; nu < 3; ++nu) {
    const Mat3 dE = central_derivative(chart_frame, x, nu, h);
    omega[nu] = E_inv * dE;
  }
  return omega;
}

TorsionTensor torsion_from(const Connection& omega) {
  TorsionTensor t;
  for (int sigma = 0; sigma < 3; ++sigma) {
    for (int mu = 0; mu < 3; ++mu) {
      for (int nu = 0; nu < 3; ++nu) {
        t.components[sigma](mu, nu) = omega[mu](sigma, nu) - omega[nu](sigma, mu);
      }
    }
  }
  return t;
}

Eigen::Vector3d round_metric_diagonal(const ChartPoint& x) {
  const double sc = std::sin(x.chi), st = std::sin(x.theta);
  return {1.0, sc * sc, sc * sc * st * st};
}

// gamma[k](i, j) = Gamma^k_{ij} of the diagonal round metric.
std::array<Mat3, 3> round_christoffel(const ChartPoint& x, double h) {
  std::array<Eigen::Vector3d, 3> dg;  // dg[l] = d_l of the diagonal entries
  for (int l = 0; l < 3; ++l) {
    dg[l] = (round_metric_diagonal(shifted(x, l, h)) -
             round_metric_diagonal(shifted(x, l, -h))) /
            (2.0 * h);
  }
  const Eigen::Vector3d g = round_metric_diagonal(x);
  // d_l g_{ij} is nonzero only for i == j
  auto dmetric = [&](int l, int i, int j) { return i == j ? dg[l][i] : 0.0; };
  std::array<Mat3, 3> gamma;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        gamma[k](i, j) =
            0.5 / g[k] * (dmetric(i, k, j) + dmetric(j, k, i) - dmetric(k, i, j));
      }
    }
  }
  return gamma;
}

}  // namespace

double TorsionTensor::max_abs() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

double CurvatureTensor::max_abs() const {
  double m = 0.0;
  for (const auto& row : components) {
    for (const auto& c : row) m = std::max(m, c.cwiseAbs().maxCoeff());
  }
  return m;
}

TangentFrame tangent_frame(const Rotord& q) {
  if (!q.is_unit()) {
    throw Error(ErrorCode::kNonUnitRotor, "tangent_frame: |q| != 1");
  }
  const std::array<Rotord, 3> base_bivectors = {
      Rotord(0, 1, 0, 0), Rotord(0, 0, 1, 0), Rotord(0, 0, 0, 1)};
  TangentFrame frame;
  frame.base = q;
  for (int mu = 0; mu < 3; ++mu) {
    frame.rows.row(mu) = (base_bivectors[mu] * q).coeffs().transpose();
  }
  return frame;
}

TangentFrame frame_transport(const TangentFrame& frame_at_q, const Rotord& p) {
  const Rotord step = frame_at_q.base.reversed() * p;
  TangentFrame out;
  out.base = p;
  for (int mu = 0; mu < 3; ++mu) {
    out.rows.row(mu) = (frame_at_q.row_rotor(mu) * step).coeffs().transpose();
  }
  return out;
}

Eigen::Matrix3d flat_metric(const TangentFrame& frame) {
  return frame.rows * frame.rows.transpose();
}

Eigen::Matrix3d frame_reciprocity(const TangentFrame& frame) {
  const Eigen::Matrix<double, 4, 3> pseudo_inverse = frame.rows.transpose();
  return frame.rows * pseudo_inverse;
}

Eigen::Matrix3d chart_frame(const ChartPoint& x) {
  const Rotord q = round_to_flat(embed_round(x.chi, x.theta, x.phi));
  return tangent_frame(q).rows * embed_round_jacobian(x);
}

void check_admissible(const ChartPoint& x, double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) {
    throw Error(ErrorCode::kStepOutOfRange, "step h must lie in [1e-6, 1e-3]");
  }
  const double chi_mod = std::fmod(std::fmod(x.chi, kPi) + kPi, kPi);
  const bool chi_ok = chi_mod >= kChartCollar && chi_mod <= kPi - kChartCollar;
  const bool theta_ok = x.theta >= kChartCollar && x.theta <= kPi - kChartCollar;
  if (!chi_ok || !theta_ok) {
    throw Error(ErrorCode::kChartDegeneracy,
                "chart point within 0.1 rad of a coordinate singularity (chi=" +
                    std::to_string(x.chi) + ", theta=" + std::to_string(x.theta) + ")");
  }
}

ConnectionCoefficients weitzenbock_connection(const ChartPoint& x, double h) {
  check_admissible(x, h);
  return {connection_at(x, h)};
}

CurvatureTensor curvature_tensor(const ChartPoint& x, double h) {
  check_admissible(x, h);
  const Connection omega = connection_at(x, h);
  // d_omega[mu][nu] = d_mu Omega_nu
  std::array<Connection, 3> d_omega;
  for (int mu = 0; mu < 3; ++mu) {
    std::array<Connection, 4> at;
    const std::array<double, 4> offsets = {h, -h, 2.0 * h, -2.0 * h};
    for (int k = 0; k < 4; ++k) at[k] = connection_at(shifted(x, mu, offsets[k]), h);
    for (int nu = 0; nu < 3; ++nu) {
      d_omega[mu][nu] =
          (8.0 * (at[0][nu] - at[1][nu]) - (at[2][nu] - at[3][nu])) / (12.0 * h);
    }
  }
  CurvatureTensor r;
  for (int mu = 0; mu < 3; ++mu) {
    for (int nu = 0; nu < 3; ++nu) {
      r.components[mu][nu] = d_omega[mu][nu] - d_omega[nu][mu] +
                             omega[mu] * omega[nu] - omega[nu] * omega[mu];
    }
  }
  return r;
}

TorsionTensor torsion_tensor(const ChartPoint& x, double h) {
  check_admissible(x, h);
  return torsion_from(connection_at(x, h));
}

TorsionTensor frame_torsion(const ChartPoint& x, double h) {
  const TorsionTensor t = torsion_tensor(x, h);
  const Mat3 E = chart_frame(x);
  const Mat3 E_inv = E.inverse();
  TorsionTensor out;
  for (int a = 0; a < 3; ++a) {
    Mat3 m = Mat3::Zero();
    for (int sigma = 0; sigma < 3; ++sigma) m += E(a, sigma) * t.components[sigma];
    out.components[a] = E_inv.transpose() * m * E_inv;
  }
  return out;
}

double round_metric_sectional_curvature(const ChartPoint& x, double h) {
  check_admissible(x, h);
  const auto gamma = round_christoffel(x, h);
  std::array<std::array<Mat3, 3>, 3> d_gamma;  // d_gamma[l][k] = d_l Gamma^k
  for (int l = 0; l < 3; ++l) {
    const auto gp = round_christoffel(shifted(x, l, h), h);
    const auto gm = round_christoffel(shifted(x, l, -h), h);
    for (int k = 0; k < 3; ++k) d_gamma[l][k] = (gp[k] - gm[k]) / (2.0 * h);
  }
  // R^rho_{sigma mu nu} with (rho, sigma, mu, nu) = (chi, theta, chi, theta)
  constexpr int kChi = 0, kTheta = 1;
  const int rho = kChi, sigma = kTheta, mu = kChi, nu = kTheta;
  double riemann = d_gamma[mu][rho](nu, sigma) - d_gamma[nu][rho](mu, sigma);
  for (int lam = 0; lam < 3; ++lam) {
    riemann += gamma[rho](mu, lam) * gamma[lam](nu, sigma) -
               gamma[rho](nu, lam) * gamma[lam](mu, sigma);
  }
  const Eigen::Vector3d g = round_metric_diagonal(x);
  return g[kChi] * riemann / (g[kChi] * g[kTheta]);
}

Bivectord torsion_bivector_su2(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d c = a.cross(b);
  if (c.norm() < 1e-12) return Bivectord::Zero();
  return beta(c);
}

double so3_torsion_magnitude(double eta) {
  if (!(eta >= -kPi / 2 - 1e-12 && eta <= 3 * kPi / 2 + 1e-12)) {
    throw Error(ErrorCode::kDomainError, "so3_torsion_magnitude: eta outside [-pi/2, 3pi/2]");
  }
  if (eta <= kPi / 2) return 2.0 * eta / kPi;
  return 2.0 - 2.0 * eta / kPi;
}

Bivectord torsion_bivector_so3(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d c = a.cross(b);
  const double cn = c.norm();
  if (cn < 1e-12) return Bivectord::Zero();
  return so3_torsion_magnitude(vector_angle(a, b)) * beta(Eigen::Vector3d(c / cn));
}

TorsionCheck torsion_check(const ChartPoint& x, double h) {
  return {x, curvature_tensor(x, h).max_abs(), torsion_tensor(x, h).max_abs(), h};
}

}  // namespace spinsphere
