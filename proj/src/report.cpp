#include "vin/report.hpp"

#include "vin/executor.hpp"
#include "vin/planner.hpp"

namespace vin {

using nlohmann::json;

json export_result(const CoopResult& result, const Scenario& scenario) {
  const CoopProblem problem = scenario.problem();
  const Planner planner(problem.model, problem.static_cost, problem.horizon,
                        {scenario.solver.mode, scenario.solver.tau, scenario.solver.idle_penalty});
  json doc;
  doc["scenario"] = {
      {"name", scenario.name},
      {"width", scenario.width()},
      {"height", scenario.height()},
      {"orientations", scenario.orientations},
      {"horizon", scenario.horizon},
      {"map", scenario.map},
      {"solver",
       {{"tau", scenario.solver.tau},
        {"eta", scenario.solver.eta},
        {"lambda_coll", scenario.solver.lambda_coll},
        {"idle_penalty", scenario.solver.idle_penalty},
        {"max_iters", scenario.solver.max_iters},
        {"mode", scenario.solver.mode == PoolMode::kSoft ? "soft" : "exact"}}},
  };
  doc["converged"] = result.converged;
  doc["collision_loss"] = result.collision;
  doc["residual_collision"] = result.residual_collision;

  json agents = json::array();
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    const Trajectory& traj = result.trajectories[i];
    const auto goals = problem.agents[i].goals;
    const auto mask = planner.goal_mask(goals);
    json poses = json::array();
    for (const Pose& p : traj.decoded) {
      poses.push_back({p.x, p.y, p.theta});
    }
    json actions = json::array();
    json step_costs = json::array();
    for (int t = 1; t <= traj.horizon(); ++t) {
      const int a = traj.actions[t - 1];
      actions.push_back(problem.model.action(a).name);
      step_costs.push_back(planner.transition_cost(traj.decoded[t - 1], a, t, mask));
    }
    json occupancy = json::array();
    for (int t = 0; t <= traj.horizon(); ++t) {
      const Grid2 occ = soft_occupancy(traj, t);
      json cells = json::array();
      for (int y = 0; y < occ.height(); ++y) {
        for (int x = 0; x < occ.width(); ++x) {
          if (occ(x, y) > 1e-9) cells.push_back({x, y, occ(x, y)});
        }
      }
      occupancy.push_back(std::move(cells));
    }
    json agent = {{"id", i},
                  {"mode", traj.mode == PoolMode::kSoft ? "soft" : "exact"},
                  {"poses", std::move(poses)},
                  {"actions", std::move(actions)},
                  {"step_costs", std::move(step_costs)},
                  {"occupancy", std::move(occupancy)}};
    if (i < result.costs.size()) agent["total_cost"] = result.costs[i];
    if (i < result.extrinsics.size()) agent["extrinsic_max"] = result.extrinsics[i].max_abs();
    agents.push_back(std::move(agent));
  }
  doc["agents"] = std::move(agents);

  json trace = json::array();
  for (const IterationRecord& r : result.trace) {
    trace.push_back({{"iteration", r.iteration},
                     {"objective", r.objective},
                     {"collision", r.collision},
                     {"gradient_norm", r.gradient_norm}});
  }
  doc["trace"] = std::move(trace);
  return doc;
}

ImportedResult import_result(const json& doc) {
  ImportedResult out;
  try {
    out.scenario_name = doc.at("scenario").at("name").get<std::string>();
    out.horizon = doc.at("scenario").at("horizon").get<int>();
    const int width = doc.at("scenario").at("width").get<int>();
    const int height = doc.at("scenario").at("height").get<int>();
    out.converged = doc.at("converged").get<bool>();
    out.collision_loss = doc.at("collision_loss").get<double>();
    for (const json& a : doc.at("agents")) {
      ImportedAgent agent;
      for (const json& p : a.at("poses")) {
        agent.poses.push_back({p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>()});
      }
      agent.actions = a.at("actions").get<std::vector<std::string>>();
      agent.step_costs = a.at("step_costs").get<std::vector<double>>();
      agent.total_cost = a.value("total_cost", 0.0);
      for (const json& cells : a.at("occupancy")) {
        Grid2 occ(width, height, 0.0);
        for (const json& c : cells) occ(c.at(0).get<int>(), c.at(1).get<int>()) = c.at(2).get<double>();
        agent.occupancy.push_back(std::move(occ));
      }
      out.agents.push_back(std::move(agent));
    }
    for (const json& r : doc.at("trace")) {
      out.trace.push_back({r.at("iteration").get<int>(), r.at("objective").get<double>(),
                           r.at("collision").get<double>(), r.at("gradient_norm").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed result document: ") + e.what());
  }
  return out;
}

}  // namespace vin
