#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinsphere/chsh.hpp"
#include "spinsphere/errors.hpp"
#include "spinsphere/io.hpp"
#include "spinsphere/parallel_for.hpp"
#include "spinsphere/oracle.hpp"
#include "spinsphere/parallelization.hpp"
#include "spinsphere/sphere_geometry.hpp"
#include "spinsphere/spin_sim.hpp"

using namespace spinsphere;
using nlohmann::json;

namespace {

constexpr double kDeg = M_PI / 180.0;

enum Exit { kOk = 0, kArgs = 1, kIo = 2, kNumeric = 3 };

struct Globals {
  std::string output = "-";
  std::string format;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

std::string resolved_format(const Globals& g, const std::string& fallback) {
  return g.format.empty() ? fallback : g.format;
}

void emit(const Globals& g, const std::string& text) {
  if (g.output == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text(g.output, text);
  }
}

// Writes a table either as CSV with the given header or as a JSON array of
// objects keyed by the header names.
void emit_table(const Globals& g, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  if (resolved_format(g, "csv") == "json") {
    json out = json::array();
    for (const auto& r : rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = r[i];
      out.push_back(obj);
    }
    emit(g, out.dump(2) + "\n");
    return;
  }
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += '\n';
  for (const auto& r : rows) text += csv_row(r);
  emit(g, text);
}

void cmd_distances(const Globals& g, const AngleGrid& grid) {
  std::vector<std::vector<double>> rows;
  for (double deg : grid.degrees()) {
    const auto d = distance_sample(deg * kDeg);
    rows.push_back({deg, d.su2, d.so3});
  }
  emit_table(g, {"eta", "su2", "so3"}, rows);
}

void cmd_simulate(const Globals& g, const std::string& config_path) {
  SimulateConfig config = simulate_config_from_json(read_json_file(config_path));
  if (g.seed) config.experiment.seed = *g.seed;
  if (g.threads) config.experiment.threads = g.threads;
  const auto trials = simulate_ensemble(config.experiment);
  std::vector<std::vector<double>> rows(config.pairs.size());
  parallel_for(config.pairs.size(), config.experiment.threads,
               [&](std::size_t begin, std::size_t end, std::size_t) {
                 for (std::size_t i = begin; i < end; ++i) {
                   const auto& [a, b] = config.pairs[i];
                   const auto r = correlate(trials, a, b);
                   rows[i] = {config.angles_deg[i], r.raw_mc, r.raw_stderr,
                              r.standard_score_scalar,
                              r.standard_score_residual_bivector_norm,
                              r.scalar_product_form, r.su2_reference, r.so3_reference};
                 }
               });
  emit_table(g,
             {"eta_deg", "raw_mc", "raw_stderr", "std_score", "residual", "scalar_form",
              "su2_ref", "so3_ref"},
             rows);
}

void cmd_oracle(const Globals& g, const AngleGrid& grid) {
  std::vector<std::vector<double>> rows;
  for (double deg : grid.degrees()) rows.push_back({deg, sign_model_oracle(deg * kDeg)});
  emit_table(g, {"theta_deg", "oracle"}, rows);
}

std::vector<ChartPoint> random_chart_points(std::uint64_t seed, int count) {
  const double lo = kChartCollar + 0.01, hi = M_PI - kChartCollar - 0.01;
  std::vector<ChartPoint> out;
  for (int i = 0; i < count; ++i) {
    TrialStream s(seed, static_cast<std::uint64_t>(i));
    const double chi = lo + (hi - lo) * s.uniform();
    const double theta = lo + (hi - lo) * s.uniform();
    out.push_back({chi, theta, 2.0 * M_PI * s.uniform()});
  }
  return out;
}

void cmd_torsion_check(const Globals& g, const std::string& points_path, int count,
                       double h) {
  const auto points = points_path.empty()
                          ? random_chart_points(g.seed.value_or(0), count)
                          : chart_points_from_json(read_json_file(points_path));
  if (points.empty()) throw Error(ErrorCode::kInvalidConfig, "no chart points given");
  std::vector<TorsionCheck> checks(points.size());
  parallel_for(points.size(), g.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) checks[i] = torsion_check(points[i], h);
  });
  double max_curv = 0.0, min_torsion = INFINITY, max_torsion = 0.0;
  json records = json::array();
  std::vector<std::vector<double>> rows;
  for (const auto& c : checks) {
    max_curv = std::max(max_curv, c.max_abs_curvature);
    min_torsion = std::min(min_torsion, c.max_abs_torsion);
    max_torsion = std::max(max_torsion, c.max_abs_torsion);
    records.push_back({{"point", {c.point.chi, c.point.theta, c.point.phi}},
                       {"max_abs_curvature", c.max_abs_curvature},
                       {"max_abs_torsion", c.max_abs_torsion},
                       {"h", c.h}});
    rows.push_back({c.point.chi, c.point.theta, c.point.phi, c.max_abs_curvature,
                    c.max_abs_torsion});
  }
  if (resolved_format(g, "json") == "csv") {
    emit_table(g, {"chi", "theta", "phi", "max_abs_curvature", "max_abs_torsion"}, rows);
  } else {
    emit(g, records.dump(2) + "\n");
  }
  std::FILE* summary = g.output == "-" ? stderr : stdout;
  std::fprintf(summary,
               "points=%zu h=%.3g max_abs_curvature=%.6e min_max_abs_torsion=%.6e "
               "max_abs_torsion=%.6e\n",
               checks.size(), h, max_curv, min_torsion, max_torsion);
}

void cmd_chsh(const Globals& g, const std::string& kind_name, OptimizerConfig opt,
              std::int64_t n_trials) {
  const CorrelationKind kind = correlation_kind_from_string(kind_name);
  opt.threads = g.threads;
  if (g.seed) opt.seed = *g.seed;
  std::vector<TrialRecord> trials;
  if (kind == CorrelationKind::kMonteCarlo) {
    ExperimentConfig x;
    x.n_trials = n_trials;
    x.seed = opt.seed;
    x.threads = g.threads;
    trials = simulate_ensemble(x);
  }
  const BoundReport r = maximize_chsh(kind, opt, trials);
  json out = {{"kind", to_string(kind)},
              {"max_abs_chsh", r.chsh_value},
              {"argmax_degrees", r.argmax_degrees},
              {"bound", kTsirelsonBound},
              {"coplanar_max", r.coplanar_max},
              {"full_sphere_max", r.full_sphere_max},
              {"rhs_bound", r.rhs_bound},
              {"evaluations", r.evaluations}};
  emit(g, out.dump(2) + "\n");
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kTooFewTrials:
      return kArgs;
    default:
      return kNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics of the parallelized 3-sphere"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--output,-o", g.output, "Output file ('-' for stdout)");
  app.add_option("--format", g.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Overrides the configured seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

  AngleGrid distance_grid{0.0, 360.0, 1.0};
  auto* distances = app.add_subcommand("distances", "SU(2) and SO(3) geodesic distances");
  distances->add_option("--start", distance_grid.start, "First eta, degrees");
  distances->add_option("--stop", distance_grid.stop, "Last eta, degrees");
  distances->add_option("--step", distance_grid.step, "Eta step, degrees");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo correlation curve");
  simulate->add_option("config", config_path, "JSON run config")->required();

  AngleGrid oracle_grid{0.0, 180.0, 5.0};
  auto* oracle = app.add_subcommand("oracle", "Sign-model correlation by quadrature");
  oracle->add_option("--start", oracle_grid.start, "First theta, degrees");
  oracle->add_option("--stop", oracle_grid.stop, "Last theta, degrees");
  oracle->add_option("--step", oracle_grid.step, "Theta step, degrees");

  std::string points_path;
  int n_points = 100;
  double h = kDefaultStep;
  auto* torsion = app.add_subcommand("torsion-check", "Curvature and torsion of the frame");
  torsion->add_option("points_file", points_path, "JSON array of chart points");
  torsion->add_option("--count", n_points, "Size of the random suite")
      ->check(CLI::PositiveNumber);
  torsion->add_option("--step", h, "Finite-difference step");

  std::string kind = "su2_cosine";
  OptimizerConfig opt;
  std::int64_t n_trials = 1'000'000;
  bool restarts_set = false;
  auto* chsh = app.add_subcommand("chsh", "Maximize |CHSH| for a correlation kind");
  chsh->add_option("--kind", kind, "su2_cosine, so3_saw or monte_carlo");
  chsh->add_option("--budget", opt.max_evaluations, "Maximum correlator evaluations");
  chsh->add_option("--restarts", opt.restarts, "Full-sphere random restarts")
      ->each([&](const std::string&) { restarts_set = true; });
  chsh->add_option("--trials", n_trials, "Ensemble size for monte_carlo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kArgs;
  }

  try {
    if (*distances) {
      cmd_distances(g, distance_grid);
    } else if (*simulate) {
      cmd_simulate(g, config_path);
    } else if (*oracle) {
      cmd_oracle(g, oracle_grid);
    } else if (*torsion) {
      cmd_torsion_check(g, points_path, n_points, h);
    } else if (*chsh) {
      if (!restarts_set && kind == "monte_carlo") opt.restarts = 0;
      cmd_chsh(g, kind, opt, n_trials);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kOk;
}
