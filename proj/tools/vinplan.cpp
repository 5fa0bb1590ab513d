// Command-line front end: single-agent planning, cooperative optimization,
// oracle fixtures and rendering.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vin/coop.hpp"
#include "vin/executor.hpp"
#include "vin/oracle.hpp"
#include "vin/planner.hpp"
#include "vin/render.hpp"
#include "vin/report.hpp"
#include "vin/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kScenarioError = 1, kInfeasible = 2, kNotConverged = 3 };

struct Options {
  std::string scenario;
  std::string out = ".";
  std::string result;
  std::string mode;
  double tau = -1.0;
  double eta = -1.0;
  double lambda_coll = -1.0;
  int max_iters = -1;
  unsigned seed = 0;  // reserved; the solver is deterministic
  bool trace = false;
  int cell_px = 16;
};

vin::Scenario load(const Options& opt) {
  vin::Scenario sc = vin::load_scenario(opt.scenario);
  if (opt.mode == "soft") sc.solver.mode = vin::PoolMode::kSoft;
  if (opt.mode == "exact") sc.solver.mode = vin::PoolMode::kExact;
  if (opt.tau > 0.0) sc.solver.tau = opt.tau;
  if (opt.eta >= 0.0) sc.solver.eta = opt.eta;
  if (opt.lambda_coll > 0.0) sc.solver.lambda_coll = opt.lambda_coll;
  if (opt.max_iters > 0) sc.solver.max_iters = opt.max_iters;
  return sc;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vin::Error("cannot write '" + path.string() + "'");
  out << bytes;
}

void write_outputs(const Options& opt, const vin::Scenario& sc, const vin::CoopResult& result) {
  fs::create_directories(opt.out);
  write_file(fs::path(opt.out) / "result.json", vin::export_result(result, sc).dump(2) + "\n");
  for (const auto& traj : result.trajectories) {
    const auto frame = vin::render(traj, sc.map, sc.horizon, opt.cell_px);
    const std::string stem = "agent" + std::to_string(traj.agent_id);
    write_file(fs::path(opt.out) / (stem + ".ppm"), frame.ppm());
    std::cout << "agent " << traj.agent_id << ":\n" << frame.ascii(sc.map);
  }
}

int run_plan(const Options& opt) {
  const vin::Scenario sc = load(opt);
  const vin::CoopProblem problem = sc.problem();
  const vin::Planner planner(problem.model, problem.static_cost, problem.horizon,
                             {sc.solver.mode, sc.solver.tau, sc.solver.idle_penalty});
  const auto zero = vin::ExtrinsicCost::zeros(sc.horizon, sc.width(), sc.height());
  vin::CoopResult result;
  for (std::size_t i = 0; i < problem.agents.size(); ++i) {
    const auto& agent = problem.agents[i];
    const auto volume = planner.plan(agent.start, agent.goals, zero);
    auto traj = vin::backtrace(volume, agent.goals, problem.model, static_cast<int>(i));
    result.costs.push_back(vin::goal_cost(volume, agent.goals));
    result.trajectories.push_back(std::move(traj));
    result.extrinsics.push_back(zero);
  }
  result.collision = vin::collision_loss(result.trajectories);
  result.residual_collision = result.collision > 0.0;
  result.converged = true;
  write_outputs(opt, sc, result);
  return kOk;
}

int run_coop(const Options& opt) {
  const vin::Scenario sc = load(opt);
  const auto result = vin::optimize(sc.problem(), [&](const vin::IterationRecord& r) {
    if (opt.trace) {
      std::cout << "iter=" << r.iteration << " J=" << vin::format_double(r.objective)
                << " coll=" << vin::format_double(r.collision)
                << " gnorm=" << vin::format_double(r.gradient_norm) << '\n';
    }
  });
  write_outputs(opt, sc, result);
  std::cout << "converged=" << (result.converged ? "true" : "false")
            << " collision=" << vin::format_double(result.collision)
            << " ensemble_cost=" << vin::format_double(result.ensemble_cost()) << '\n';
  return result.converged && !result.residual_collision ? kOk : kNotConverged;
}

int run_oracle(const Options& opt) {
  const vin::Scenario sc = load(opt);
  const vin::CoopProblem problem = sc.problem();
  json doc;
  doc["scenario"] = sc.name;
  doc["horizon"] = sc.horizon;
  json agents = json::array();
  bool infeasible = false;
  for (std::size_t i = 0; i < problem.agents.size(); ++i) {
    const auto& agent = problem.agents[i];
    const vin::oracle::TimeExpandedGraph graph(problem.model, problem.static_cost,
                                               problem.horizon, agent.goals,
                                               sc.solver.idle_penalty);
    const auto dist = vin::oracle::shortest_costs(graph, agent.start);
    double best = vin::kInfCost;
    json by_time = json::array();
    for (int t = 0; t <= problem.horizon; ++t) {
      double at_t = vin::kInfCost;
      for (const auto& g : agent.goals) at_t = std::min(at_t, dist[graph.node(g, t)]);
      by_time.push_back(at_t);
      if (t == problem.horizon) best = at_t;
    }
    infeasible = infeasible || best >= vin::kInfCost;
    agents.push_back({{"id", i}, {"goal_cost", best}, {"goal_cost_by_time", by_time}});
  }
  doc["agents"] = std::move(agents);
  if (problem.agents.size() == 2) {
    try {
      const auto joint = vin::oracle::joint_optimum(problem);
      json paths = json::array();
      for (const auto& path : joint.paths) {
        json poses = json::array();
        for (const auto& p : path) poses.push_back({p.x, p.y, p.theta});
        paths.push_back(std::move(poses));
      }
      doc["joint"] = {{"feasible", joint.feasible}, {"cost", joint.cost}, {"paths", paths}};
    } catch (const vin::RefusalError& e) {
      doc["joint"] = {{"refused", e.what()}};
    }
  }
  fs::create_directories(opt.out);
  const std::string text = doc.dump(2) + "\n";
  write_file(fs::path(opt.out) / "oracle.json", text);
  std::cout << text;
  return infeasible ? kInfeasible : kOk;
}

int run_render(const Options& opt) {
  const vin::Scenario sc = load(opt);
  std::ifstream in(opt.result);
  if (!in) throw vin::ScenarioError("cannot open result file '" + opt.result + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw vin::ScenarioError(std::string("cannot parse result file: ") + e.what());
  }
  const auto imported = vin::import_result(doc);
  fs::create_directories(opt.out);
  for (std::size_t i = 0; i < imported.agents.size(); ++i) {
    const auto frame =
        vin::render_occupancy(imported.agents[i].occupancy, sc.map, imported.horizon, opt.cell_px);
    write_file(fs::path(opt.out) / ("agent" + std::to_string(i) + ".ppm"), frame.ppm());
    std::cout << "agent " << i << ":\n" << frame.ascii(sc.map);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative trajectory planning with value iteration networks"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", opt.scenario, "Scenario file")->required();
    cmd->add_option("--out", opt.out, "Output directory");
    cmd->add_option("--mode", opt.mode, "soft or exact")->check(CLI::IsMember({"soft", "exact"}));
    cmd->add_option("--tau", opt.tau, "Softmin temperature");
    cmd->add_option("--eta", opt.eta, "Gradient step size");
    cmd->add_option("--lambda-coll", opt.lambda_coll, "Collision weight");
    cmd->add_option("--max-iters", opt.max_iters, "Iteration limit");
    cmd->add_option("--seed", opt.seed, "Reserved; the solver is deterministic");
    cmd->add_flag("--trace", opt.trace, "Log one line per optimizer iteration");
    cmd->add_option("--cell-px", opt.cell_px, "Pixels per map cell in renders");
  };
  auto* plan = app.add_subcommand("plan", "Plan every agent on its own");
  auto* coop = app.add_subcommand("coop", "Cooperative multi-agent optimization");
  auto* oracle = app.add_subcommand("oracle", "Brute-force reference costs");
  auto* render = app.add_subcommand("render", "Render an exported result");
  for (auto* cmd : {plan, coop, oracle, render}) common(cmd);
  render->add_option("--result", opt.result, "Exported result.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return run_plan(opt);
    if (*coop) return run_coop(opt);
    if (*oracle) return run_oracle(opt);
    if (*render) return run_render(opt);
  } catch (const vin::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const vin::ScenarioError& e) {
    std::cerr << e.what() << '\n';
    return kScenarioError;
  } catch (const vin::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kScenarioError;
  }
  return kOk;
}
