#include "spinsphere/chsh.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "spinsphere/errors.hpp"
#include "spinsphere/parallel_for.hpp"
#include "spinsphere/sphere_geometry.hpp"

namespace spinsphere {
namespace {

constexpr double kDeg = M_PI / 180.0;

class EvaluationBudget {
 public:
  explicit EvaluationBudget(std::int64_t limit) : limit_(limit) {}

  void charge(std::int64_t n) {
    used_ += n;
    if (used_ > limit_) {
      throw Error(ErrorCode::kOptimizerBudgetExceeded,
                  "maximize_chsh exceeded " + std::to_string(limit_) + " evaluations");
    }
  }
  std::int64_t used() const { return used_; }

 private:
  std::int64_t limit_;
  std::int64_t used_ = 0;
};

Eigen::Vector3d in_plane(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

Eigen::Vector3d on_sphere(double polar, double azimuth) {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
          std::cos(polar)};
}

double abs_chsh(const std::array<Eigen::Vector3d, 4>& d, const Correlator& e) {
  ChshConfig c{d[0], d[1], d[2], d[3], CorrelationKind::kSu2Cosine};
  return std::abs(chsh_string(c, e));
}

// Maximizes f over params by coordinate descent with step halving.
template <std::size_t N, typename F>
double coordinate_descent(std::array<double, N>& params, double step, double tolerance,
                          EvaluationBudget& budget, F&& f) {
  double best = f(params);
  budget.charge(1);
  while (step >= tolerance) {
    bool improved = false;
    for (std::size_t i = 0; i < N; ++i) {
      for (double dir : {1.0, -1.0}) {
        auto trial = params;
        trial[i] += dir * step;
        const double v = f(trial);
        budget.charge(1);
        if (v > best) {
          best = v;
          params = trial;
          improved = true;
        }
      }
    }
    if (!improved) step /= 2.0;
  }
  return best;
}

double normalize_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

}  // namespace

std::string to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::kSu2Cosine: return "su2_cosine";
    case CorrelationKind::kSo3Saw: return "so3_saw";
    case CorrelationKind::kMonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

CorrelationKind correlation_kind_from_string(const std::string& name) {
  if (name == "su2_cosine") return CorrelationKind::kSu2Cosine;
  if (name == "so3_saw") return CorrelationKind::kSo3Saw;
  if (name == "monte_carlo") return CorrelationKind::kMonteCarlo;
  throw Error(ErrorCode::kInvalidConfig, "unknown correlation kind '" + name + "'");
}

double su2_correlation(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return -a.dot(b);
}

double so3_correlation(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return so3_distance(vector_angle(a, b));
}

Correlator monte_carlo_correlator(std::span<const TrialRecord> trials) {
  return [trials](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return raw_correlation(trials, a, b).estimate;
  };
}

void ChshConfig::validate() const {
  for (const auto* v : {&a, &a_prime, &b, &b_prime}) {
    if (std::abs(v->norm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::kInvalidConfig, "CHSH directions must be unit vectors");
    }
  }
}

double chsh_string(const ChshConfig& c, const Correlator& e) {
  return e(c.a, c.b) + e(c.a, c.b_prime) + e(c.a_prime, c.b) - e(c.a_prime, c.b_prime);
}

Bivectord commutator_torsion(const Eigen::Vector3d& a, const Eigen::Vector3d& a_prime,
                             int lambda) {
  const Multivectord la = spin_bivector(a, lambda).multivector();
  const Multivectord lb = spin_bivector(a_prime, lambda).multivector();
  return bivector_of(0.5 * (spin_product(la, lb, lambda) - spin_product(lb, la, lambda)));
}

double variance_rhs(const Eigen::Vector3d& a, const Eigen::Vector3d& a_prime,
                    const Eigen::Vector3d& b, const Eigen::Vector3d& b_prime) {
  const double x = a.cross(a_prime).dot(b_prime.cross(b));
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - x));
}

VarianceRhs variance_rhs(const Eigen::Vector3d& a, const Eigen::Vector3d& a_prime,
                         const Eigen::Vector3d& b, const Eigen::Vector3d& b_prime,
                         std::span<const TrialRecord> trials) {
  const Eigen::Vector3d u = a.cross(a_prime);
  const Eigen::Vector3d v = b_prime.cross(b);
  double mean_lambda = 0.0;
  if (!trials.empty()) {
    std::int64_t sum = 0;
    for (const auto& t : trials) sum += t.lambda;
    mean_lambda = static_cast<double>(sum) / static_cast<double>(trials.size());
  }
  const double radicand = 4.0 - 4.0 * u.dot(v) - 4.0 * mean_lambda * u.cross(v).norm();
  return {variance_rhs(a, a_prime, b, b_prime), std::sqrt(std::max(0.0, radicand))};
}

BoundReport maximize_chsh(CorrelationKind kind, const OptimizerConfig& config,
                          std::span<const TrialRecord> trials) {
  if (!(config.grid_step_deg > 0.0) || !(config.refine_tolerance > 0.0) ||
      config.restarts < 0) {
    throw Error(ErrorCode::kInvalidConfig, "invalid optimizer configuration");
  }
  Correlator e;
  switch (kind) {
    case CorrelationKind::kSu2Cosine: e = su2_correlation; break;
    case CorrelationKind::kSo3Saw: e = so3_correlation; break;
    case CorrelationKind::kMonteCarlo:
      if (trials.size() < 2) {
        throw Error(ErrorCode::kTooFewTrials, "monte_carlo CHSH needs an ensemble");
      }
      e = monte_carlo_correlator(trials);
      break;
  }

  const auto n = static_cast<std::int64_t>(std::llround(360.0 / config.grid_step_deg));
  if (n < 1 || std::abs(static_cast<double>(n) * config.grid_step_deg - 360.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidConfig, "grid step must divide 360 degrees");
  }
  EvaluationBudget budget(config.max_evaluations);
  budget.charge(n * n * n);

  const double step = config.grid_step_deg * kDeg;
  std::vector<double> table(static_cast<std::size_t>(n));
  parallel_for(table.size(), config.threads, [&](std::size_t begin, std::size_t end,
                                                 std::size_t) {
    for (std::size_t d = begin; d < end; ++d) {
      table[d] = e(in_plane(0.0), in_plane(static_cast<double>(d) * step));
    }
  });

  // a at angle 0; (i, j, k) index a', b, b'.
  struct Best {
    double value = -1.0;
    std::int64_t index = -1;
  };
  const unsigned chunks = resolve_threads(config.threads);
  std::vector<Best> per_chunk(chunks);
  parallel_for(static_cast<std::size_t>(n), chunks,
               [&](std::size_t begin, std::size_t end, std::size_t chunk) {
                 Best best;
                 for (auto i = static_cast<std::int64_t>(begin);
                      i < static_cast<std::int64_t>(end); ++i) {
                   for (std::int64_t j = 0; j < n; ++j) {
                     const double e_ab = table[j];
                     const double e_apb = table[(j - i + n) % n];
                     for (std::int64_t k = 0; k < n; ++k) {
                       const double s = std::abs(e_ab + table[k] + e_apb - table[(k - i + n) % n]);
                       if (s > best.value) best = {s, (i * n + j) * n + k};
                     }
                   }
                 }
                 per_chunk[chunk] = best;
               });
  Best grid_best;
  for (const auto& b : per_chunk) {
    if (b.index >= 0 && b.value > grid_best.value) grid_best = b;
  }

  std::array<double, 3> planar = {
      static_cast<double>(grid_best.index / (n * n)) * step,
      static_cast<double>((grid_best.index / n) % n) * step,
      static_cast<double>(grid_best.index % n) * step};
  auto planar_value = [&](const std::array<double, 3>& p) {
    return abs_chsh({in_plane(0.0), in_plane(p[0]), in_plane(p[1]), in_plane(p[2])}, e);
  };
  const double coplanar_max =
      coordinate_descent(planar, step, config.refine_tolerance, budget, planar_value);

  BoundReport report;
  report.kind = kind;
  report.coplanar_max = coplanar_max;
  report.directions = {in_plane(0.0), in_plane(planar[0]), in_plane(planar[1]),
                       in_plane(planar[2])};
  report.argmax_degrees = {0.0, normalize_degrees(planar[0] / kDeg),
                           normalize_degrees(planar[1] / kDeg),
                           normalize_degrees(planar[2] / kDeg)};

  // polar/azimuth pairs for a, a', b, b'
  auto sphere_dirs = [](const std::array<double, 8>& p) {
    return std::array<Eigen::Vector3d, 4>{on_sphere(p[0], p[1]), on_sphere(p[2], p[3]),
                                          on_sphere(p[4], p[5]), on_sphere(p[6], p[7])};
  };
  double full_max = -std::numeric_limits<double>::infinity();
  std::array<Eigen::Vector3d, 4> full_dirs;
  for (int r = 0; r < config.restarts; ++r) {
    TrialStream stream(config.seed, static_cast<std::uint64_t>(r));
    std::array<double, 8> p;
    for (int v = 0; v < 4; ++v) {
      const auto n01 = stream.normal_pair();
      const auto n2 = stream.normal_pair();
      const Eigen::Vector3d g(n01[0], n01[1], n2[0]);
      p[2 * v] = std::atan2(std::hypot(g[0], g[1]), g[2]);
      p[2 * v + 1] = std::atan2(g[1], g[0]);
    }
    const double v = coordinate_descent(
        p, 0.5, config.refine_tolerance, budget,
        [&](const std::array<double, 8>& q) { return abs_chsh(sphere_dirs(q), e); });
    if (v > full_max) {
      full_max = v;
      full_dirs = sphere_dirs(p);
    }
  }
  report.full_sphere_max = config.restarts > 0 ? full_max : coplanar_max;
  report.chsh_value = coplanar_max;
  if (config.restarts > 0 && full_max > coplanar_max) {
    report.chsh_value = full_max;
    report.directions = full_dirs;
  }
  const auto& d = report.directions;
  report.rhs_bound = variance_rhs(d[0], d[1], d[2], d[3]);
  report.evaluations = budget.used();
  return report;
}

}  // namespace spinsphere
