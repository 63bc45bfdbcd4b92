#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "spinsphere/sphere_geometry.hpp"
#include "spinsphere/spin_sim.hpp"
#include "test_support.hpp"

using namespace spinsphere;

namespace {

template <typename F>
void expect_error(F&& f, ErrorCode code) {
  try {
    f();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code);
  }
}

ExperimentConfig config(std::int64_t n, LambdaMode mode, std::uint64_t seed = 7) {
  ExperimentConfig c;
  c.n_trials = n;
  c.seed = seed;
  c.lambda_mode = mode;
  return c;
}

const Eigen::Vector3d e1 = Eigen::Vector3d::UnitX();
const Eigen::Vector3d e2 = Eigen::Vector3d::UnitY();
const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();

}  // namespace

TEST(Ensemble, BalancedHasExactHalves) {
  const auto trials = simulate_ensemble(config(4, LambdaMode::kBalancedExact));
  int plus = 0;
  for (const auto& t : trials) plus += t.lambda > 0;
  EXPECT_EQ(plus, 2);
  const auto big = simulate_ensemble(config(10'000, LambdaMode::kBalancedExact));
  long sum = 0;
  for (const auto& t : big) sum += t.lambda;
  EXPECT_EQ(sum, 0);
}

TEST(Ensemble, InvalidConfigs) {
  expect_error([] { simulate_ensemble(config(3, LambdaMode::kBalancedExact)); },
               ErrorCode::kInvalidConfig);
  expect_error([] { simulate_ensemble(config(0, LambdaMode::kFairCoin)); },
               ErrorCode::kInvalidConfig);
  auto c = config(10, LambdaMode::kFairCoin);
  c.directions = {Eigen::Vector3d(1, 1, 0)};
  expect_error([&] { simulate_ensemble(c); }, ErrorCode::kInvalidConfig);
}

TEST(Ensemble, FairCoinAndIsotropy) {
  auto c = config(1'000'000, LambdaMode::kFairCoin, 11);
  const auto trials = simulate_ensemble(c);
  double lambda_sum = 0.0;
  std::vector<double> sz(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    lambda_sum += trials[i].lambda;
    sz[i] = trials[i].s[2];
    ASSERT_NEAR(trials[i].s.norm(), 1.0, 1e-12);
  }
  EXPECT_LT(std::abs(lambda_sum / 1e6), 0.004);
  const double mean_sz = pairwise_sum(sz) / 1e6;
  EXPECT_LT(std::abs(mean_sz), 0.002);
  double second = 0.0;
  for (double z : sz) second += z * z;
  EXPECT_NEAR(second / 1e6, 1.0 / 3.0, 0.003);
}

TEST(Ensemble, DeterministicAcrossThreadCounts) {
  auto c = config(20'001, LambdaMode::kFairCoin, 99);
  c.alignment_mode = AlignmentMode::kUniformR;
  c.directions = {e1, e2};
  c.threads = 1;
  const auto one = simulate_ensemble(c);
  for (unsigned threads : {2u, 3u, 8u}) {
    c.threads = threads;
    const auto many = simulate_ensemble(c);
    ASSERT_EQ(one.size(), many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      ASSERT_EQ(one[i].s, many[i].s);
      ASSERT_EQ(one[i].lambda, many[i].lambda);
      ASSERT_EQ(one[i].r_a, many[i].r_a);
    }
  }
  auto b = config(2'000, LambdaMode::kBalancedExact, 5);
  b.threads = 1;
  const auto b1 = simulate_ensemble(b);
  b.threads = 7;
  const auto b7 = simulate_ensemble(b);
  for (std::size_t i = 0; i < b1.size(); ++i) ASSERT_EQ(b1[i].lambda, b7[i].lambda);
}

TEST(Ensemble, SeedChangesStream) {
  const auto a = simulate_ensemble(config(10, LambdaMode::kFairCoin, 1));
  const auto b = simulate_ensemble(config(10, LambdaMode::kFairCoin, 2));
  EXPECT_NE(a[0].s, b[0].s);
}

TEST(Ensemble, AlignmentMode) {
  auto c = config(10'000, LambdaMode::kFairCoin);
  for (const auto& t : simulate_ensemble(c)) ASSERT_EQ(t.r_a, 1.0);
  c.alignment_mode = AlignmentMode::kUniformR;
  double sum = 0.0;
  for (const auto& t : simulate_ensemble(c)) {
    ASSERT_GE(t.r_a, 0.0);
    ASSERT_LT(t.r_a, 1.0);
    sum += t.r_a;
  }
  EXPECT_NEAR(sum / 1e4, 0.5, 0.01);
}

TEST(Ensemble, ResamplesAgainstConfiguredDirections) {
  auto c = config(50'000, LambdaMode::kFairCoin);
  c.directions = {e1, e3};
  for (const auto& t : simulate_ensemble(c)) {
    ASSERT_GE(std::abs(t.s.dot(e1)), 1e-12);
    ASSERT_GE(std::abs(t.s.dot(e3)), 1e-12);
  }
}

TEST(TrialStream, BelowIsInRangeAndCoversValues) {
  TrialStream s(3, 4);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = s.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 850);
}

TEST(PairwiseSum, MatchesExactSum) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 499500.0);
  EXPECT_EQ(pairwise_sum(std::span<const double>()), 0.0);
}

TEST(RawScores, Examples) {
  TrialRecord t;
  t.s = e1;
  EXPECT_EQ(raw_score_pair(t, e1, e1), std::make_pair(1, -1));
  EXPECT_EQ(raw_score_pair(t, e1, -e1), std::make_pair(1, 1));
}

TEST(RawCorrelation, EqualSettingsAreExactlyAnticorrelated) {
  const auto trials = simulate_ensemble(config(10'000, LambdaMode::kFairCoin));
  testing_support::Rng rng(40);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d a = rng.unit3();
    const auto r = raw_correlation(trials, a, a);
    EXPECT_EQ(r.estimate, -1.0);
    EXPECT_EQ(r.stderr_, 0.0);
  }
}

TEST(RawCorrelation, PerpendicularSettingsNearZero) {
  auto c = config(1'000'000, LambdaMode::kFairCoin, 41);
  c.directions = {e1, e2};
  const auto trials = simulate_ensemble(c);
  const auto r = raw_correlation(trials, e1, e2);
  EXPECT_NEAR(r.stderr_, 1e-3, 1e-5);
  EXPECT_LT(std::abs(r.estimate), 3 * r.stderr_);
}

TEST(RawCorrelation, StandardErrorFormula) {
  // Products with (a, b) = (e1, e2): -1, +1, -1, -1; mean -0.5.
  std::vector<TrialRecord> trials(4);
  const Eigen::Vector3d up = Eigen::Vector3d(1, 1, 0).normalized();
  const Eigen::Vector3d down = Eigen::Vector3d(1, -1, 0).normalized();
  trials[0].s = up;
  trials[1].s = down;
  trials[2].s = up;
  trials[3].s = up;
  const auto r = raw_correlation(trials, e1, e2);
  EXPECT_EQ(r.estimate, -0.5);
  // sample variance (n / (n - 1)) (1 - m^2) = 1, stderr = 1 / sqrt(4)
  EXPECT_DOUBLE_EQ(r.stderr_, 0.5);
  expect_error([] { raw_correlation(std::vector<TrialRecord>(1), e1, e2); },
               ErrorCode::kTooFewTrials);
}

TEST(RawCorrelation, InvariantUnderGlobalRotation) {
  testing_support::Rng rng(42);
  auto trials = simulate_ensemble(config(20'000, LambdaMode::kFairCoin));
  const Rotord R = rng.rotor();
  auto rotated = trials;
  for (auto& t : rotated) t.s = rotate_vector(R, t.s);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d a = rng.unit3(), b = rng.unit3();
    EXPECT_EQ(raw_correlation(trials, a, b).estimate,
              raw_correlation(rotated, rotate_vector(R, a), rotate_vector(R, b)).estimate);
  }
}

TEST(Measurements, ScalarOutcomes) {
  testing_support::Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d a = rng.unit3();
    for (int lambda : {1, -1}) {
      const Multivectord A = measurement_A(a, lambda), B = measurement_B(a, lambda);
      EXPECT_NEAR(A.scalar(), lambda, 1e-15);
      EXPECT_NEAR(B.scalar(), -lambda, 1e-15);
      EXPECT_LT((A - Multivectord::FromScalar(A.scalar())).norm(), 1e-15);
      EXPECT_LT((B - Multivectord::FromScalar(B.scalar())).norm(), 1e-15);
    }
  }
}

TEST(StandardScore, Examples) {
  EXPECT_TRUE(standard_score(e3, 1).isApprox(beta(e3), 0.0));
  EXPECT_TRUE(standard_score(e3, -1).isApprox(-beta(e3), 0.0));
  testing_support::Rng rng(44);
  const Eigen::Vector3d a = rng.unit3();
  for (int lambda : {1, -1}) {
    for (double psi : {0.3, 2.0, 5.1}) {
      EXPECT_TRUE(standard_score_from_quaternion(psi, a, lambda)
                      .isApprox(standard_score(a, lambda), 1e-15));
    }
  }
}

TEST(StandardScoreCorrelation, Examples) {
  const auto balanced = simulate_ensemble(config(1000, LambdaMode::kBalancedExact));
  const auto same = standard_score_correlation(balanced, e1, e1);
  EXPECT_EQ(same.scalar, -1.0);
  EXPECT_EQ(same.residual_norm, 0.0);
  testing_support::Rng rng(45);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d a = rng.unit3(), b = rng.unit3();
    const auto r = standard_score_correlation(balanced, a, b);
    EXPECT_NEAR(r.scalar, -a.dot(b), 1e-15);
    EXPECT_EQ(r.residual_norm, 0.0);
  }
  const auto fair = simulate_ensemble(config(10'000, LambdaMode::kFairCoin, 46));
  const auto perp = standard_score_correlation(fair, e1, e2);
  EXPECT_EQ(perp.scalar, 0.0);
  EXPECT_LT(perp.residual_norm, 0.04);
  expect_error([] { standard_score_correlation({}, e1, e2); }, ErrorCode::kTooFewTrials);
}

TEST(StandardScoreCorrelation, ResidualTracksMeanLambda) {
  testing_support::Rng rng(47);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto trials = simulate_ensemble(config(999, LambdaMode::kFairCoin, seed));
    long sum = 0;
    for (const auto& t : trials) sum += t.lambda;
    const Eigen::Vector3d a = rng.unit3(), b = rng.unit3();
    const auto r = standard_score_correlation(trials, a, b);
    EXPECT_NEAR(r.scalar, -a.dot(b), 1e-15);
    EXPECT_NEAR(r.residual_norm, std::abs(sum / 999.0) * a.cross(b).norm(), 1e-15);
  }
}

TEST(ScalarProductCorrelation, AlwaysMinusOne) {
  const auto trials = simulate_ensemble(config(1000, LambdaMode::kFairCoin));
  EXPECT_EQ(scalar_product_correlation(trials, e1, e1), -1.0);
  EXPECT_EQ(scalar_product_correlation(trials, e1, e2), -1.0);
  EXPECT_EQ(raw_correlation(trials, e1, e1).estimate, -1.0);
  testing_support::Rng rng(48);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(scalar_product_correlation(trials, rng.unit3(), rng.unit3()), -1.0, 1e-15);
  }
}

TEST(CorrelationCurve, MatchesSerialEvaluation) {
  const auto trials = simulate_ensemble(config(5000, LambdaMode::kBalancedExact));
  std::vector<Eigen::Vector3d> bs;
  for (int d = 0; d <= 180; d += 15) {
    bs.emplace_back(std::cos(d * M_PI / 180), std::sin(d * M_PI / 180), 0.0);
  }
  const auto curve = correlation_curve(trials, e1, bs, 4);
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const auto r = correlate(trials, e1, bs[i]);
    EXPECT_EQ(curve[i].raw_mc, r.raw_mc);
    EXPECT_EQ(curve[i].standard_score_scalar, r.standard_score_scalar);
    EXPECT_EQ(curve[i].su2_reference, -bs[i].dot(e1));
  }
}

TEST(Quaternion, FactorsThroughP) {
  testing_support::Rng rng(49);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d a = rng.unit3();
    const double psi = rng.uniform(0, 4 * M_PI);
    for (int lambda : {1, -1}) {
      const Rotord pL = p_quaternion(psi, a) * Rotord(0.0, spin_bivector(a, lambda));
      EXPECT_TRUE(quaternion_at(psi, a, lambda).isApprox(pL, 1e-15));
    }
  }
}

TEST(QuaternionStdDev, Examples) {
  const auto trials = simulate_ensemble(config(100, LambdaMode::kBalancedExact));
  testing_support::Rng rng(50);
  const Eigen::Vector3d a = rng.unit3();
  const auto at_pi = quaternion_std_dev(M_PI, a, trials);
  EXPECT_TRUE(at_pi.sigma.isApprox(Rotord::Identity(), 1e-15));
  for (double psi : {0.0, 2 * M_PI}) {
    const auto s = quaternion_std_dev(psi, a, trials);
    EXPECT_NEAR(std::abs(s.sigma.scalar()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.sigma.bivector().components().dot(a)), 1.0, 1e-15);
    EXPECT_NE(s.sign, 0);
  }
  expect_error([&] { quaternion_std_dev(-1.0, a, trials); }, ErrorCode::kDomainError);
  expect_error([&] { quaternion_std_dev(1.0, a, {}); }, ErrorCode::kTooFewTrials);
}

TEST(QuaternionStdDev, MatchesPlusOrMinusP) {
  const auto trials = simulate_ensemble(config(1000, LambdaMode::kBalancedExact));
  testing_support::Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d a = rng.unit3();
    const double psi = 4 * M_PI * i / 99.0;
    const auto s = quaternion_std_dev(psi, a, trials);
    ASSERT_NE(s.sign, 0) << psi;
    const Eigen::Vector4d expected = s.sign * p_quaternion(psi, a).coeffs();
    EXPECT_LT((s.sigma.coeffs() - expected).cwiseAbs().maxCoeff(), 1e-12) << psi;
  }
}

TEST(QuaternionSqrt, SquaresBack) {
  testing_support::Rng rng(52);
  for (int i = 0; i < 100; ++i) {
    const Rotord x(3.0 * rng.unit4());
    const Rotord r = quaternion_sqrt(x, e3);
    EXPECT_GE(r.scalar(), 0.0);
    EXPECT_TRUE((r * r).isApprox(x, 1e-14));
  }
  EXPECT_TRUE(quaternion_sqrt(Rotord(-4, 0, 0, 0), e2).isApprox(Rotord(0, 0, 2, 0), 1e-15));
}

TEST(MeasurementLimit, Examples) {
  const Eigen::Vector3d a = e3;
  const std::vector<double> to_zero = {0.1, 0.01, 1e-4};
  for (int lambda : {1, -1}) {
    const auto lim = measurement_limit(to_zero, a, lambda);
    EXPECT_EQ(lim.kappa, 0);
    EXPECT_EQ(lim.limit.scalar(), lambda);
    EXPECT_LT(lim.deviation, 1e-4);
    const Multivectord ref = -(beta(a).multivector() * spin_bivector(a, lambda).multivector());
    EXPECT_EQ(lim.limit.scalar(), ref.scalar());
  }
  const std::vector<double> to_two_pi = {6.0, 6.2, 2 * M_PI - 1e-5};
  const auto lim = measurement_limit(to_two_pi, a, 1);
  EXPECT_EQ(lim.kappa, 1);
  EXPECT_EQ(lim.limit.scalar(), -1.0);
  const std::vector<double> to_four_pi = {12.0, 4 * M_PI};
  EXPECT_EQ(measurement_limit(to_four_pi, a, -1).limit.scalar(), -1.0);
}

TEST(MeasurementLimit, NonLimitPoint) {
  const std::vector<double> at_pi = {M_PI};
  expect_error([&] { measurement_limit(at_pi, e3, 1); }, ErrorCode::kNonConvergentSequence);
  expect_error([] { measurement_limit({}, e3, 1); }, ErrorCode::kNonConvergentSequence);
  const Rotord q = quaternion_at(M_PI, e3, 1);
  EXPECT_NEAR(q.scalar(), 0.0, 1e-16);
  EXPECT_NEAR(q.bivector().norm(), 1.0, 1e-15);
}

TEST(GaussianDensity, Examples) {
  testing_support::Rng rng(53);
  const Rotord mean = rng.rotor();
  const Rotord sigma(0.3, 0.1, 0.0, 0.2);
  const double s2 = sigma.coeffs().squaredNorm();
  const double peak = gaussian_density_s3(mean, mean, sigma);
  EXPECT_NEAR(peak, 1.0 / std::sqrt(2 * M_PI * s2), 1e-15);
  const Eigen::Vector4d dir = rng.unit4();
  const Rotord one_sigma(Eigen::Vector4d(mean.coeffs() + std::sqrt(s2) * dir));
  const Rotord two_sigma(Eigen::Vector4d(mean.coeffs() + 2 * std::sqrt(s2) * dir));
  EXPECT_NEAR(gaussian_density_s3(one_sigma, mean, sigma) / peak, std::exp(-0.5), 1e-14);
  EXPECT_NEAR(gaussian_density_s3(two_sigma, mean, sigma) / peak, std::exp(-2.0), 1e-14);
  expect_error([&] { gaussian_density_s3(mean, mean, Rotord(0, 0, 0, 0)); },
               ErrorCode::kZeroDispersion);
}

TEST(PropagateError, Examples) {
  testing_support::Rng rng(54);
  const Eigen::Vector3d a = rng.unit3();
  const auto r = propagate_error(Bivectord::Zero(), 1.0, beta(a));
  EXPECT_EQ(r.m_A, 0.0);
  EXPECT_TRUE(r.sigma_A.isApprox(beta(a), 0.0));
  EXPECT_EQ(propagate_error(beta(a), 0.0, beta(a)).sigma_A.norm(), 0.0);
  EXPECT_NEAR(propagate_error(0.5 * beta(a), 1.0, beta(a)).m_A, -0.5, 1e-15);
}

TEST(SpinBasis, Components) {
  const auto plus = spin_basis(1), minus = spin_basis(-1);
  const Blade blades[] = {Blade::kE23, Blade::kE31, Blade::kE12};
  EXPECT_EQ(plus[0].scalar(), 1.0);
  EXPECT_EQ(minus[0].scalar(), 1.0);
  for (int mu = 0; mu < 3; ++mu) {
    EXPECT_EQ(plus[mu + 1].coeffs(), Multivectord::Basis(blades[mu]).coeffs());
    EXPECT_EQ(minus[mu + 1].coeffs(), Multivectord::Basis(blades[mu], -1.0).coeffs());
  }
}

TEST(SpinBasis, ClosesUnderSpinProduct) {
  auto eps = [](int i, int j, int k) {
    return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
  };
  for (int lambda : {1, -1}) {
    const auto L = spin_basis(lambda);
    for (int mu = 0; mu < 3; ++mu) {
      for (int nu = 0; nu < 3; ++nu) {
        Multivectord expected = Multivectord::FromScalar(mu == nu ? -1.0 : 0.0);
        for (int rho = 0; rho < 3; ++rho) expected -= eps(mu, nu, rho) * L[rho + 1];
        const Multivectord got = spin_product(L[mu + 1], L[nu + 1], lambda);
        EXPECT_EQ(got.coeffs(), expected.coeffs()) << lambda << " " << mu << nu;
      }
    }
  }
}
