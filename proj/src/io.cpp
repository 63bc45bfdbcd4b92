#include "spinsphere/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinsphere/errors.hpp"

namespace spinsphere {
namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

Eigen::Vector3d unit_vector_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) bad_config("direction must be an array of 3 numbers");
  Eigen::Vector3d v(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  if (std::abs(v.norm() - 1.0) > 1e-12) bad_config("direction is not a unit vector");
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  row += '\n';
  return row;
}

void AngleGrid::validate() const {
  if (!(step > 0.0)) bad_config("grid step must be > 0");
  if (!(start <= stop)) bad_config("grid start must be <= stop");
}

std::vector<double> AngleGrid::degrees() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

AngleGrid angle_grid_from_json(const json& j) {
  AngleGrid g;
  try {
    g.start = j.value("start", g.start);
    g.stop = j.value("stop", g.stop);
    g.step = j.value("step", g.step);
  } catch (const json::exception& e) {
    bad_config(std::string("grid: ") + e.what());
  }
  g.validate();
  return g;
}

SimulateConfig simulate_config_from_json(const json& j) {
  if (!j.is_object()) bad_config("config must be a JSON object");
  SimulateConfig c;
  auto& x = c.experiment;
  try {
    x.n_trials = j.value("n_trials", std::int64_t{1});
    x.seed = j.value("seed", std::uint64_t{0});
    x.threads = j.value("threads", 0u);
    const std::string lambda = j.value("lambda_mode", std::string("fair_coin"));
    if (lambda == "fair_coin") {
      x.lambda_mode = LambdaMode::kFairCoin;
    } else if (lambda == "balanced_exact") {
      x.lambda_mode = LambdaMode::kBalancedExact;
    } else {
      bad_config("unknown lambda_mode '" + lambda + "'");
    }
    const std::string align = j.value("alignment_mode", std::string("unit"));
    if (align == "unit") {
      x.alignment_mode = AlignmentMode::kUnit;
    } else if (align == "uniform_r") {
      x.alignment_mode = AlignmentMode::kUniformR;
    } else {
      bad_config("unknown alignment_mode '" + align + "'");
    }
    if (j.contains("direction_pairs")) {
      for (const auto& p : j.at("direction_pairs")) {
        if (!p.is_array() || p.size() != 2) bad_config("direction_pairs entries are [a, b]");
        c.pairs.emplace_back(unit_vector_from_json(p[0]), unit_vector_from_json(p[1]));
        c.angles_deg.push_back(vector_angle(c.pairs.back().first, c.pairs.back().second) *
                               180.0 / M_PI);
      }
    } else {
      const AngleGrid grid = angle_grid_from_json(j.value("grid", json::object()));
      const Eigen::Vector3d a = Eigen::Vector3d::UnitX();
      for (double deg : grid.degrees()) {
        const double t = deg * M_PI / 180.0;
        c.pairs.emplace_back(a, Eigen::Vector3d(std::cos(t), std::sin(t), 0.0));
        c.angles_deg.push_back(deg);
      }
    }
  } catch (const json::exception& e) {
    bad_config(std::string("config: ") + e.what());
  }
  if (c.pairs.empty()) bad_config("no direction pairs configured");
  for (const auto& [a, b] : c.pairs) {
    x.directions.push_back(a);
    x.directions.push_back(b);
  }
  validate(x);
  return c;
}

std::vector<ChartPoint> chart_points_from_json(const json& j) {
  if (!j.is_array()) bad_config("points file must hold a JSON array");
  std::vector<ChartPoint> out;
  try {
    for (const auto& p : j) {
      if (p.is_array() && p.size() == 3) {
        out.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      } else if (p.is_object()) {
        out.push_back({p.at("chi").get<double>(), p.at("theta").get<double>(),
                       p.at("phi").get<double>()});
      } else {
        bad_config("point must be [chi, theta, phi] or {chi, theta, phi}");
      }
    }
  } catch (const json::exception& e) {
    bad_config(std::string("points: ") + e.what());
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    bad_config("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace spinsphere
