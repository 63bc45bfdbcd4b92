#pragma once

// Monte Carlo ensemble of spin-orientation trials, the three correlation
// estimators built on it, and the quaternionic standard-deviation machinery.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "spinsphere/ga.hpp"

namespace spinsphere {

enum class LambdaMode { kFairCoin, kBalancedExact };
enum class AlignmentMode { kUnit, kUniformR };

struct ExperimentConfig {
  std::int64_t n_trials = 1;
  std::uint64_t seed = 0;
  LambdaMode lambda_mode = LambdaMode::kFairCoin;
  AlignmentMode alignment_mode = AlignmentMode::kUnit;
  /// Directions against which s is resampled when s.d vanishes.
  std::vector<Eigen::Vector3d> directions;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct TrialRecord {
  Eigen::Vector3d s;
  int lambda = 1;
  double r_a = 1.0;
};

struct CorrelationResult {
  Eigen::Vector3d a;
  Eigen::Vector3d b;
  double raw_mc = 0.0;
  double raw_stderr = 0.0;
  double standard_score_scalar = 0.0;
  double standard_score_residual_bivector_norm = 0.0;
  double scalar_product_form = 0.0;
  double su2_reference = 0.0;
  double so3_reference = 0.0;
};

/// Counter-based SplitMix64 stream; draw k of stream (seed, index) is a pure
/// function of (seed, index, k).
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  std::array<double, 2> normal_pair();

 private:
  std::uint64_t state_;
};

void validate(const ExperimentConfig& config);

std::vector<TrialRecord> simulate_ensemble(const ExperimentConfig& config);

double pairwise_sum(std::span<const double> values);

std::pair<int, int> raw_score_pair(const TrialRecord& trial, const Eigen::Vector3d& a,
                                   const Eigen::Vector3d& b);

struct RawCorrelation {
  double estimate;
  double stderr_;
};

RawCorrelation raw_correlation(std::span<const TrialRecord> trials,
                               const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// L(a, lambda) = lambda beta(a).
Bivectord spin_bivector(const Eigen::Vector3d& a, int lambda);

Multivectord measurement_A(const Eigen::Vector3d& a, int lambda);
Multivectord measurement_B(const Eigen::Vector3d& b, int lambda);

Bivectord standard_score(const Eigen::Vector3d& a, int lambda);
/// q(psi, a, lambda) p(psi, a)^dagger.
Bivectord standard_score_from_quaternion(double psi, const Eigen::Vector3d& a, int lambda);

struct StandardScoreCorrelation {
  double scalar;
  double residual_norm;
};

StandardScoreCorrelation standard_score_correlation(std::span<const TrialRecord> trials,
                                                    const Eigen::Vector3d& a,
                                                    const Eigen::Vector3d& b);

double scalar_product_correlation(std::span<const TrialRecord> trials,
                                  const Eigen::Vector3d& a, const Eigen::Vector3d& b);

CorrelationResult correlate(std::span<const TrialRecord> trials, const Eigen::Vector3d& a,
                            const Eigen::Vector3d& b);

/// One result per b, evaluated in parallel; identical to calling correlate
/// in a loop.
std::vector<CorrelationResult> correlation_curve(std::span<const TrialRecord> trials,
                                                 const Eigen::Vector3d& a,
                                                 const std::vector<Eigen::Vector3d>& bs,
                                                 unsigned threads = 0);

/// p(psi, a) = sin(psi/2) - D(a) cos(psi/2).
Rotord p_quaternion(double psi, const Eigen::Vector3d& a);

/// q(psi, a, lambda) = lambda cos(psi/2) + L(a, lambda) sin(psi/2).
Rotord quaternion_at(double psi, const Eigen::Vector3d& a, int lambda);

/// Principal square root (nonnegative scalar part). When x is a negative
/// real, the axis of the root is `fallback_axis`.
Rotord quaternion_sqrt(const Rotord& x, const Eigen::Vector3d& fallback_axis);

struct QuaternionStdDev {
  Rotord sigma;
  /// +1 when sigma matches p(psi, a), -1 when it matches -p, 0 otherwise.
  int sign;
};

QuaternionStdDev quaternion_std_dev(double psi, const Eigen::Vector3d& a,
                                    std::span<const TrialRecord> trials);

struct MeasurementLimit {
  Multivectord limit;
  double deviation;
  int kappa;
};

MeasurementLimit measurement_limit(std::span<const double> psi_sequence,
                                   const Eigen::Vector3d& a, int lambda);

double gaussian_density_s3(const Rotord& q, const Rotord& mean, const Rotord& sigma);

struct PropagatedError {
  double m_A;
  Bivectord sigma_A;
};

PropagatedError propagate_error(const Bivectord& m_S, double sigma_S,
                                const Bivectord& detector);

std::array<Multivectord, 4> spin_basis(int lambda);

/// Product evaluated in the spin frame of orientation lambda and expressed
/// in the detector frame.
Multivectord spin_product(const Multivectord& x, const Multivectord& y, int lambda);

}  // namespace spinsphere
