#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hardcore/grid.hpp"
#include "hardcore/marginal_recursion.hpp"
#include "hardcore/ode_shooting.hpp"
#include "hardcore/volume.hpp"

namespace hardcore {

/// Shortest decimal that rounds back to the same double ("%.17g" class).
std::string format_double(double x);

/// CSV `z,F,<derivative_column>`, one row per grid point with jumps as a
/// (left limit, value) pair of rows at the same z. The derivative column is
/// empty when F carries no derivative samples.
std::string distribution_csv(const GridDistribution& F, std::string_view derivative_column = "f");

std::string trajectory_csv(const std::vector<TrajectoryPoint>& points);

nlohmann::json to_json(const RecursionReport& report);
nlohmann::json to_json(const ShootingResult& result);
nlohmann::json to_json(const HamiltonianProfile& profile);

struct VolumeRecord {
  std::string graph;
  int n_nodes = 0;
  double lambda = 1.0;
  std::string measure;
  VolumeEstimate estimate;
};
nlohmann::json to_json(const VolumeRecord& record);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::string& path, std::string_view content);

}  // namespace hardcore
