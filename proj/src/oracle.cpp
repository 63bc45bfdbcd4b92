#include "spinsphere/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spinsphere/errors.hpp"

namespace spinsphere {
namespace {

// With a on the pole and b = (sin t, 0, cos t), the fraction of azimuths at
// height u = cos(polar) for which s.b > 0.
double positive_fraction(double u, double theta) {
  const double radial = std::sin(theta) * std::sqrt(std::max(0.0, 1.0 - u * u));
  const double axial = u * std::cos(theta);
  if (radial <= 0.0) return axial > 0.0 ? 1.0 : 0.0;
  const double c = -axial / radial;
  if (c <= -1.0) return 1.0;
  if (c >= 1.0) return 0.0;
  return std::acos(c) / M_PI;
}

}  // namespace

double sign_model_oracle(double theta) {
  if (!(theta >= -1e-12 && theta <= M_PI + 1e-12)) {
    throw Error(ErrorCode::kDomainError, "sign_model_oracle: theta outside [0, pi]");
  }
  theta = std::clamp(theta, 0.0, M_PI);
  // Mean of sign(s.a) sign(-s.b) over azimuth, as a function of u.
  auto integrand = [theta](double u) {
    const double sign_a = u >= 0.0 ? 1.0 : -1.0;
    return sign_a * (1.0 - 2.0 * positive_fraction(u, theta));
  };
  const double k = std::sin(theta);
  std::array<double, 5> breaks = {-1.0, -k, 0.0, k, 1.0};
  std::sort(breaks.begin(), breaks.end());
  boost::math::quadrature::tanh_sinh<double> quad;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] - breaks[i] <= 0.0) continue;
    total += quad.integrate(integrand, breaks[i], breaks[i + 1], 1e-14);
  }
  return 0.5 * total;
}

std::vector<double> sign_model_oracle_grid(const std::vector<double>& thetas) {
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back(sign_model_oracle(t));
  return out;
}

}  // namespace spinsphere
