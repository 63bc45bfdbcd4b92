#include "spinsphere/spin_sim.hpp"

#include <cmath>
#include <string>

#include "spinsphere/errors.hpp"
#include "spinsphere/parallel_for.hpp"
#include "spinsphere/sphere_geometry.hpp"

namespace spinsphere {
namespace {

constexpr double kPi = M_PI;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr double kResampleThreshold = 1e-12;
// Stream index reserved for the balanced-lambda shuffle.
constexpr std::uint64_t kShuffleStream = ~std::uint64_t{0};

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct LambdaCounts {
  std::int64_t plus = 0;
  std::int64_t minus = 0;
  std::int64_t n() const { return plus + minus; }
};

LambdaCounts count_lambda(std::span<const TrialRecord> trials) {
  LambdaCounts c;
  for (const auto& t : trials) (t.lambda > 0 ? c.plus : c.minus) += 1;
  return c;
}

double lambda_average(const LambdaCounts& c, double plus, double minus) {
  return (static_cast<double>(c.plus) * plus + static_cast<double>(c.minus) * minus) /
         static_cast<double>(c.n());
}

Multivectord lambda_average(const LambdaCounts& c, const Multivectord& plus,
                            const Multivectord& minus) {
  return Multivectord((static_cast<double>(c.plus) * plus.coeffs() +
                       static_cast<double>(c.minus) * minus.coeffs()) /
                      static_cast<double>(c.n()));
}

Rotord scaled(const Rotord& q, double s) { return Rotord(Eigen::Vector4d(s * q.coeffs())); }

Rotord rotor_sum(const Rotord& x, const Rotord& y) {
  return Rotord(Eigen::Vector4d(x.coeffs() + y.coeffs()));
}

Rotord lambda_average(const LambdaCounts& c, const Rotord& plus, const Rotord& minus) {
  const double n = static_cast<double>(c.n());
  return Rotord(Eigen::Vector4d((static_cast<double>(c.plus) * plus.coeffs() +
                                 static_cast<double>(c.minus) * minus.coeffs()) /
                                n));
}

Eigen::Vector3d draw_direction(TrialStream& stream,
                               const std::vector<Eigen::Vector3d>& directions) {
  for (;;) {
    const auto n01 = stream.normal_pair();
    const auto n2 = stream.normal_pair();
    const Eigen::Vector3d v(n01[0], n01[1], n2[0]);
    const double norm = v.norm();
    if (norm < 1e-300) continue;
    const Eigen::Vector3d s = v / norm;
    bool degenerate = false;
    for (const auto& d : directions) {
      if (std::abs(s.dot(d)) < kResampleThreshold) {
        degenerate = true;
        break;
      }
    }
    if (!degenerate) return s;
  }
}

int sign_of(double x) { return x >= 0.0 ? 1 : -1; }

}  // namespace

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t index)
    : state_(mix64(seed ^ mix64(index + kGolden))) {}

std::uint64_t TrialStream::next() {
  state_ += kGolden;
  return mix64(state_);
}

double TrialStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double TrialStream::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t TrialStream::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::array<double, 2> TrialStream::normal_pair() {
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * kPi * uniform();
  return {r * std::cos(angle), r * std::sin(angle)};
}

void validate(const ExperimentConfig& config) {
  if (config.n_trials < 1) {
    throw Error(ErrorCode::kInvalidConfig, "n_trials must be >= 1");
  }
  if (config.lambda_mode == LambdaMode::kBalancedExact && config.n_trials % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "balanced_exact requires an even n_trials");
  }
  for (const auto& d : config.directions) {
    if (std::abs(d.norm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::kInvalidConfig, "directions must be unit vectors");
    }
  }
}

std::vector<TrialRecord> simulate_ensemble(const ExperimentConfig& config) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.n_trials);
  std::vector<TrialRecord> trials(n);
  const bool fair = config.lambda_mode == LambdaMode::kFairCoin;
  const bool uniform_r = config.alignment_mode == AlignmentMode::kUniformR;
  parallel_for(n, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      TrialStream stream(config.seed, i);
      TrialRecord& t = trials[i];
      t.s = draw_direction(stream, config.directions);
      t.lambda = fair ? ((stream.next() >> 63) != 0 ? 1 : -1) : 1;
      t.r_a = uniform_r ? stream.uniform() : 1.0;
    }
  });
  if (!fair) {
    for (std::size_t i = 0; i < n; ++i) trials[i].lambda = i < n / 2 ? 1 : -1;
    TrialStream shuffle(config.seed, kShuffleStream);
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(shuffle.below(i + 1));
      std::swap(trials[i].lambda, trials[j].lambda);
    }
  }
  return trials;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::pair<int, int> raw_score_pair(const TrialRecord& trial, const Eigen::Vector3d& a,
                                   const Eigen::Vector3d& b) {
  return {sign_of(trial.s.dot(a)), sign_of(-trial.s.dot(b))};
}

RawCorrelation raw_correlation(std::span<const TrialRecord> trials,
                               const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  if (trials.size() < 2) {
    throw Error(ErrorCode::kTooFewTrials, "raw_correlation needs at least 2 trials");
  }
  std::int64_t sum = 0;
  for (const auto& t : trials) {
    const auto [A, B] = raw_score_pair(t, a, b);
    sum += A * B;
  }
  const double n = static_cast<double>(trials.size());
  const double mean = static_cast<double>(sum) / n;
  const double var = std::max(0.0, (1.0 - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

Bivectord spin_bivector(const Eigen::Vector3d& a, int lambda) {
  return static_cast<double>(lambda) * beta(a);
}

Multivectord spin_product(const Multivectord& x, const Multivectord& y, int lambda) {
  auto to_spin_frame = [lambda](Multivectord m) {
    m.coeffs().segment<3>(4) *= static_cast<double>(lambda);
    return m;
  };
  return to_spin_frame(to_spin_frame(x) * to_spin_frame(y));
}

std::array<Multivectord, 4> spin_basis(int lambda) {
  const double l = lambda;
  return {Multivectord::FromScalar(1.0), Multivectord::Basis(Blade::kE23, l),
          Multivectord::Basis(Blade::kE31, l), Multivectord::Basis(Blade::kE12, l)};
}

Multivectord measurement_A(const Eigen::Vector3d& a, int lambda) {
  return -(beta(a).multivector() * spin_bivector(a, lambda).multivector());
}

Multivectord measurement_B(const Eigen::Vector3d& b, int lambda) {
  return beta(b).multivector() * spin_bivector(b, lambda).multivector();
}

Bivectord standard_score(const Eigen::Vector3d& a, int lambda) {
  return spin_bivector(a, lambda);
}

Bivectord standard_score_from_quaternion(double psi, const Eigen::Vector3d& a, int lambda) {
  return (quaternion_at(psi, a, lambda) * p_quaternion(psi, a).reversed()).bivector();
}

StandardScoreCorrelation standard_score_correlation(std::span<const TrialRecord> trials,
                                                    const Eigen::Vector3d& a,
                                                    const Eigen::Vector3d& b) {
  if (trials.empty()) {
    throw Error(ErrorCode::kTooFewTrials, "standard_score_correlation needs trials");
  }
  auto product = [&](int lambda) {
    return spin_product(standard_score(a, lambda).multivector(),
                        standard_score(b, lambda).multivector(), lambda);
  };
  const Multivectord mean = lambda_average(count_lambda(trials), product(1), product(-1));
  return {mean.scalar(), mean.bivector_part().norm()};
}

double scalar_product_correlation(std::span<const TrialRecord> trials,
                                  const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  if (trials.empty()) {
    throw Error(ErrorCode::kTooFewTrials, "scalar_product_correlation needs trials");
  }
  auto product = [&](int lambda) {
    return measurement_A(a, lambda).scalar() * measurement_B(b, lambda).scalar();
  };
  return lambda_average(count_lambda(trials), product(1), product(-1));
}

CorrelationResult correlate(std::span<const TrialRecord> trials, const Eigen::Vector3d& a,
                            const Eigen::Vector3d& b) {
  CorrelationResult r;
  r.a = a;
  r.b = b;
  const auto raw = raw_correlation(trials, a, b);
  r.raw_mc = raw.estimate;
  r.raw_stderr = raw.stderr_;
  const auto ss = standard_score_correlation(trials, a, b);
  r.standard_score_scalar = ss.scalar;
  r.standard_score_residual_bivector_norm = ss.residual_norm;
  r.scalar_product_form = scalar_product_correlation(trials, a, b);
  r.su2_reference = -a.dot(b);
  r.so3_reference = so3_distance(vector_angle(a, b));
  return r;
}

std::vector<CorrelationResult> correlation_curve(std::span<const TrialRecord> trials,
                                                 const Eigen::Vector3d& a,
                                                 const std::vector<Eigen::Vector3d>& bs,
                                                 unsigned threads) {
  std::vector<CorrelationResult> out(bs.size());
  parallel_for(bs.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) out[i] = correlate(trials, a, bs[i]);
  });
  return out;
}

Rotord p_quaternion(double psi, const Eigen::Vector3d& a) {
  return Rotord(std::sin(psi / 2), -std::cos(psi / 2) * beta(a));
}

Rotord quaternion_at(double psi, const Eigen::Vector3d& a, int lambda) {
  const double l = lambda;
  return Rotord(l * std::cos(psi / 2), std::sin(psi / 2) * spin_bivector(a, lambda));
}

Rotord quaternion_sqrt(const Rotord& x, const Eigen::Vector3d& fallback_axis) {
  const double r = x.norm();
  if (r == 0.0) return Rotord(0, 0, 0, 0);
  const Eigen::Vector3d b = x.bivector().components();
  const double bn = b.norm();
  const double phi = std::atan2(bn, x.scalar());
  const Eigen::Vector3d axis =
      bn <= 1e-12 * r ? Eigen::Vector3d(fallback_axis.normalized()) : Eigen::Vector3d(b / bn);
  const double root = std::sqrt(r);
  return Rotord(root * std::cos(phi / 2), Bivectord(root * std::sin(phi / 2) * axis));
}

QuaternionStdDev quaternion_std_dev(double psi, const Eigen::Vector3d& a,
                                    std::span<const TrialRecord> trials) {
  if (!(psi >= -1e-12 && psi <= 4.0 * kPi + 1e-12)) {
    throw Error(ErrorCode::kDomainError, "quaternion_std_dev: psi outside [0, 4 pi]");
  }
  if (trials.empty()) {
    throw Error(ErrorCode::kTooFewTrials, "quaternion_std_dev needs trials");
  }
  const LambdaCounts counts = count_lambda(trials);
  const double conj_psi = 2.0 * kPi - psi;
  const Rotord m = lambda_average(counts, quaternion_at(psi, a, 1), quaternion_at(psi, a, -1));
  const Rotord mc =
      lambda_average(counts, quaternion_at(conj_psi, a, 1), quaternion_at(conj_psi, a, -1));
  auto moment = [&](int lambda) {
    const Rotord d = rotor_sum(quaternion_at(psi, a, lambda), scaled(m, -1.0));
    const Rotord dc = rotor_sum(quaternion_at(conj_psi, a, lambda), scaled(mc, -1.0));
    return d * dc.reversed();
  };
  const Rotord second = lambda_average(counts, moment(1), moment(-1));
  QuaternionStdDev out{quaternion_sqrt(second, a), 0};
  const Rotord p = p_quaternion(psi, a);
  if (out.sigma.isApprox(p, 1e-9)) {
    out.sign = 1;
  } else if (out.sigma.isApprox(-p, 1e-9)) {
    out.sign = -1;
  }
  return out;
}

MeasurementLimit measurement_limit(std::span<const double> psi_sequence,
                                   const Eigen::Vector3d& a, int lambda) {
  if (psi_sequence.empty()) {
    throw Error(ErrorCode::kNonConvergentSequence, "empty psi sequence");
  }
  const double last = psi_sequence.back();
  const double kappa = std::round(last / (2.0 * kPi));
  if (kappa < 0.0 || kappa > 2.0 || std::abs(last - 2.0 * kappa * kPi) > 1e-3) {
    const Rotord q = quaternion_at(last, a, lambda);
    throw Error(ErrorCode::kNonConvergentSequence,
                "sequence tail psi=" + std::to_string(last) +
                    " is not within 1e-3 of 0, 2pi or 4pi (q has bivector norm " +
                    std::to_string(q.bivector().norm()) + ")");
  }
  const int k = static_cast<int>(kappa);
  MeasurementLimit out;
  out.kappa = k;
  out.limit = Multivectord::FromScalar(k % 2 == 0 ? lambda : -lambda);
  out.deviation = (quaternion_at(last, a, lambda).multivector() - out.limit).norm();
  return out;
}

double gaussian_density_s3(const Rotord& q, const Rotord& mean, const Rotord& sigma) {
  const double s2 = sigma.coeffs().squaredNorm();
  if (!(s2 > 0.0)) {
    throw Error(ErrorCode::kZeroDispersion, "gaussian_density_s3: |sigma| = 0");
  }
  const double d2 = (q.coeffs() - mean.coeffs()).squaredNorm();
  return std::exp(-d2 / (2.0 * s2)) / std::sqrt(2.0 * kPi * s2);
}

PropagatedError propagate_error(const Bivectord& m_S, double sigma_S,
                                const Bivectord& detector) {
  return {(detector.multivector() * m_S.multivector()).scalar(), sigma_S * detector};
}

}  // namespace spinsphere
