#pragma once

// File formats shared by the command-line tool: 17-digit CSV, JSON run
// configs and angle grids.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsphere/sphere_geometry.hpp"
#include "spinsphere/spin_sim.hpp"

namespace spinsphere {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g, round-trip safe.
std::string format_double(double x);

std::string csv_row(const std::vector<double>& values);

/// Inclusive grid in degrees.
struct AngleGrid {
  double start = 0.0;
  double stop = 360.0;
  double step = 1.0;

  /// Throws InvalidConfig unless step > 0 and start <= stop.
  void validate() const;
  std::vector<double> degrees() const;
};

AngleGrid angle_grid_from_json(const nlohmann::json& j);

struct SimulateConfig {
  ExperimentConfig experiment;
  /// Either a grid of b angles against a = e1 in the e1-e2 plane or an
  /// explicit list of pairs.
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> pairs;
  /// Angle of each pair in degrees; the grid value when a grid was given.
  std::vector<double> angles_deg;
};

/// Throws InvalidConfig on missing or malformed fields.
SimulateConfig simulate_config_from_json(const nlohmann::json& j);

std::vector<ChartPoint> chart_points_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace spinsphere
