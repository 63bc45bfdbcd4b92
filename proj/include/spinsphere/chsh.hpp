#pragma once

// CHSH string, the torsion commutator, the variance bound and a
// deterministic maximizer of |CHSH| over direction quadruples.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "spinsphere/ga.hpp"
#include "spinsphere/spin_sim.hpp"

namespace spinsphere {

inline const double kTsirelsonBound = 2.0 * std::sqrt(2.0);

enum class CorrelationKind { kSu2Cosine, kSo3Saw, kMonteCarlo };

std::string to_string(CorrelationKind kind);
/// Throws InvalidConfig for an unknown name.
CorrelationKind correlation_kind_from_string(const std::string& name);

using Correlator = std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&)>;

double su2_correlation(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
double so3_correlation(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
/// Raw Monte Carlo estimator on a fixed ensemble; the span must outlive the
/// returned correlator.
Correlator monte_carlo_correlator(std::span<const TrialRecord> trials);

struct ChshConfig {
  Eigen::Vector3d a, a_prime, b, b_prime;
  CorrelationKind correlation_kind = CorrelationKind::kSu2Cosine;

  /// Throws InvalidConfig unless all four directions are unit within 1e-12.
  void validate() const;
};

/// E(a,b) + E(a,b') + E(a',b) - E(a',b').
double chsh_string(const ChshConfig& config, const Correlator& correlator);

/// (1/2)[L(a), L(a')] evaluated in the spin frame; equals -L(a x a').
Bivectord commutator_torsion(const Eigen::Vector3d& a, const Eigen::Vector3d& a_prime,
                             int lambda);

struct VarianceRhs {
  /// 2 sqrt(1 - (a x a').(b' x b)).
  double idealized;
  /// Includes the mean-lambda term of the ensemble.
  double finite_n;
};

VarianceRhs variance_rhs(const Eigen::Vector3d& a, const Eigen::Vector3d& a_prime,
                         const Eigen::Vector3d& b, const Eigen::Vector3d& b_prime,
                         std::span<const TrialRecord> trials);

/// Idealized value only.
double variance_rhs(const Eigen::Vector3d& a, const Eigen::Vector3d& a_prime,
                    const Eigen::Vector3d& b, const Eigen::Vector3d& b_prime);

struct OptimizerConfig {
  double grid_step_deg = 1.0;
  double refine_tolerance = 1e-4;
  int restarts = 100;
  std::uint64_t seed = 0;
  std::int64_t max_evaluations = 200'000'000;
  unsigned threads = 0;
};

struct BoundReport {
  CorrelationKind kind;
  /// max |CHSH| found.
  double chsh_value;
  /// Idealized variance bound at the maximizing quadruple.
  double rhs_bound;
  /// a, a', b, b'.
  std::array<Eigen::Vector3d, 4> directions;
  /// In-plane angles of the coplanar maximizer, degrees.
  std::array<double, 4> argmax_degrees;
  double coplanar_max;
  double full_sphere_max;
  std::int64_t evaluations;
};

/// For kMonteCarlo, `trials` supplies the fixed ensemble; otherwise it is
/// ignored.
BoundReport maximize_chsh(CorrelationKind kind, const OptimizerConfig& config,
                          std::span<const TrialRecord> trials = {});

}  // namespace spinsphere
