#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "vin/coop.hpp"
#include "vin/lattice.hpp"
#include "vin/scenario.hpp"

namespace vin {

/// Machine-readable record of a run: solver parameters, per-agent poses,
/// actions, step costs and occupancies, the collision loss and the
/// optimizer trace.
nlohmann::json export_result(const CoopResult& result, const Scenario& scenario);

struct ImportedAgent {
  std::vector<Pose> poses;
  std::vector<std::string> actions;
  std::vector<double> step_costs;
  double total_cost = 0.0;
  /// Planar occupancy per timestep.
  std::vector<Grid2> occupancy;
};

struct ImportedResult {
  std::string scenario_name;
  int horizon = 0;
  bool converged = false;
  double collision_loss = 0.0;
  std::vector<ImportedAgent> agents;
  std::vector<IterationRecord> trace;
};

ImportedResult import_result(const nlohmann::json& doc);

}  // namespace vin
