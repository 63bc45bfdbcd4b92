#pragma once

// Sign-model correlation E(theta) = int sign(s.a) sign(-s.b) dOmega / 4 pi
// over the uniform sphere, by quadrature.

#include <vector>

namespace spinsphere {

/// theta in [0, pi]; absolute accuracy better than 1e-10.
double sign_model_oracle(double theta);

std::vector<double> sign_model_oracle_grid(const std::vector<double>& thetas);

}  // namespace spinsphere
