#include "vin/coop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vin/tape.hpp"

namespace vin {

namespace {

void check_problem(const CoopProblem& problem, const std::vector<ExtrinsicCost>& extrinsics) {
  if (problem.agents.empty()) throw ConfigurationError("problem has no agents");
  if (!(problem.options.collision_weight > 0.0)) {
    throw ConfigurationError("collision weight must be positive");
  }
  if (extrinsics.size() != problem.agents.size()) {
    throw ConfigurationError("one extrinsic cost per agent is required");
  }
  for (const auto& e : extrinsics) {
    if (e.horizon() != problem.horizon) {
      throw ConfigurationError("extrinsic cost must have one grid per timestep");
    }
    for (const Grid2& g : e.steps) {
      if (!g.same_shape(problem.static_cost)) {
        throw ConfigurationError("extrinsic cost grid does not match the map");
      }
    }
  }
}

Planner soft_planner(const CoopProblem& problem) {
  return Planner(problem.model, problem.static_cost, problem.horizon,
                 {PoolMode::kSoft, problem.options.temperature, problem.options.idle_penalty});
}

}  // namespace

double CoopResult::ensemble_cost() const {
  return std::accumulate(costs.begin(), costs.end(), 0.0);
}

double collision_loss(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) return 0.0;
  const int horizon = trajectories.front().horizon();
  for (const auto& t : trajectories) {
    if (t.horizon() != horizon) throw ConfigurationError("trajectory horizons differ");
  }
  std::vector<std::vector<Grid2>> occ(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    for (int t = 0; t <= horizon; ++t) occ[i].push_back(soft_occupancy(trajectories[i], t));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    for (std::size_t j = i + 1; j < occ.size(); ++j) {
      for (int t = 0; t <= horizon; ++t) {
        total += frobenius(occ[i][t], occ[j][t]);
        if (t > 0) {
          total += frobenius(occ[i][t], occ[j][t - 1]);
          total += frobenius(occ[i][t - 1], occ[j][t]);
        }
      }
    }
  }
  return total;
}

ObjectiveEvaluation evaluate_objective(const CoopProblem& problem,
                                       const std::vector<ExtrinsicCost>& extrinsics,
                                       bool with_gradient) {
  check_problem(problem, extrinsics);
  const Planner planner = soft_planner(problem);
  const std::size_t agents = problem.agents.size();
  const int horizon = problem.horizon;

  Tape tape;
  std::vector<std::vector<Tape::Var>> ext_vars(agents);
  std::vector<TapedTrajectory> taped(agents);
  std::vector<Tape::Var> cost_terms;
  std::vector<std::vector<Tape::Var>> occ(agents);

  for (std::size_t i = 0; i < agents; ++i) {
    const AgentSpec& agent = problem.agents[i];
    for (const Grid2& g : extrinsics[i].steps) ext_vars[i].push_back(tape.variable(g));
    const TapedVolume volume = planner.record(tape, agent.start, agent.goals, ext_vars[i]);
    const auto goals = goal_states(planner.bounds(), agent.goals);
    try {
      taped[i] = record_backtrace(tape, volume, goals, planner);
    } catch (const InfeasibleError&) {
      throw InfeasibleError("agent " + std::to_string(i) + " cannot reach its goal",
                            static_cast<int>(i));
    }
    const auto mask = planner.goal_mask(agent.goals);
    std::vector<Tape::Var> steps;
    for (int t = 1; t <= horizon; ++t) {
      steps.push_back(tape.dot(taped[i].weights[t], planner.arrival_costs(t, mask).storage()));
    }
    cost_terms.push_back(steps.empty() ? tape.constant(0.0) : tape.sum(steps));
    for (int t = 0; t <= horizon; ++t) {
      occ[i].push_back(tape.marginalize_orientation(taped[i].states[t]));
    }
  }

  std::vector<Tape::Var> overlaps;
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j = i + 1; j < agents; ++j) {
      for (int t = 0; t <= horizon; ++t) {
        overlaps.push_back(tape.frobenius(occ[i][t], occ[j][t]));
        if (t > 0) {
          overlaps.push_back(tape.frobenius(occ[i][t], occ[j][t - 1]));
          overlaps.push_back(tape.frobenius(occ[i][t - 1], occ[j][t]));
        }
      }
    }
  }
  const Tape::Var collision = overlaps.empty() ? tape.constant(0.0) : tape.sum(overlaps);
  std::vector<Tape::Var> total_terms = cost_terms;
  total_terms.push_back(tape.scale(collision, problem.options.collision_weight));
  const Tape::Var total = tape.sum(total_terms);

  ObjectiveEvaluation out;
  out.objective = tape.scalar(total);
  out.collision = tape.scalar(collision);
  for (std::size_t i = 0; i < agents; ++i) {
    out.true_costs.push_back(tape.scalar(cost_terms[i]));
    out.trajectories.push_back(
        read_trajectory(tape, taped[i], planner, static_cast<int>(i), PoolMode::kSoft));
  }
  if (with_gradient) {
    const Tape::Gradients grads = tape.backward(total);
    for (std::size_t i = 0; i < agents; ++i) {
      ExtrinsicCost g = ExtrinsicCost::zeros(horizon, problem.static_cost.width(),
                                             problem.static_cost.height());
      for (int t = 0; t < horizon; ++t) g.steps[t].storage() = grads.of(ext_vars[i][t]);
      out.gradient.push_back(std::move(g));
    }
  }
  return out;
}

double objective(const CoopProblem& problem, const std::vector<ExtrinsicCost>& extrinsics) {
  return evaluate_objective(problem, extrinsics, false).objective;
}

CoopResult execute_exact(const CoopProblem& problem, std::vector<ExtrinsicCost> extrinsics) {
  check_problem(problem, extrinsics);
  const Planner planner(problem.model, problem.static_cost, problem.horizon,
                        {PoolMode::kExact, problem.options.temperature,
                         problem.options.idle_penalty});
  CoopResult result;
  for (std::size_t i = 0; i < problem.agents.size(); ++i) {
    const AgentSpec& agent = problem.agents[i];
    const CostVolume volume = planner.plan(agent.start, agent.goals, extrinsics[i]);
    Trajectory traj;
    try {
      traj = backtrace(volume, agent.goals, problem.model, static_cast<int>(i));
    } catch (const InfeasibleError&) {
      throw InfeasibleError("agent " + std::to_string(i) + " cannot reach its goal",
                            static_cast<int>(i));
    }
    result.costs.push_back(decoded_cost(traj, planner, agent.goals));
    result.trajectories.push_back(std::move(traj));
  }
  result.extrinsics = std::move(extrinsics);
  result.collision = collision_loss(result.trajectories);
  result.residual_collision = result.collision > 0.0;
  return result;
}

CoopResult optimize(const CoopProblem& problem,
                    const std::function<void(const IterationRecord&)>& on_iteration) {
  if (problem.agents.size() < 2) {
    throw ConfigurationError("cooperative optimization needs at least two agents");
  }
  const CoopOptions& opt = problem.options;
  const int width = problem.static_cost.width();
  const int height = problem.static_cost.height();
  std::vector<ExtrinsicCost> extrinsics(problem.agents.size(),
                                        ExtrinsicCost::zeros(problem.horizon, width, height));
  std::vector<IterationRecord> trace;
  bool converged = false;

  for (int iter = 0; iter < opt.max_iters; ++iter) {
    ObjectiveEvaluation eval = evaluate_objective(problem, extrinsics, true);
    double sq = 0.0;
    for (const auto& g : eval.gradient) {
      for (const Grid2& step : g.steps) {
        for (double v : step.data()) sq += v * v;
      }
    }
    const IterationRecord record{iter, eval.objective, eval.collision, std::sqrt(sq)};
    trace.push_back(record);
    if (on_iteration) on_iteration(record);

    if (iter == 0 && eval.collision < opt.interaction_floor) {
      converged = true;
      break;
    }
    if (eval.collision < opt.collision_tol &&
        static_cast<int>(trace.size()) > opt.window) {
      double worst = 0.0;
      for (std::size_t k = trace.size() - opt.window; k < trace.size(); ++k) {
        const double prev = trace[k - 1].objective;
        worst = std::max(worst, std::abs(trace[k].objective - prev) /
                                    std::max(std::abs(prev), 1e-12));
      }
      if (worst < opt.objective_rel_tol) {
        converged = true;
        break;
      }
    }
    for (std::size_t i = 0; i < extrinsics.size(); ++i) {
      for (int t = 0; t < problem.horizon; ++t) {
        auto& e = extrinsics[i].steps[t].storage();
        const auto& g = eval.gradient[i].steps[t].storage();
        for (std::size_t k = 0; k < e.size(); ++k) {
          e[k] = std::max(0.0, e[k] - opt.step_size * g[k]);
        }
      }
    }
  }

  CoopResult result = execute_exact(problem, std::move(extrinsics));
  result.trace = std::move(trace);
  result.converged = converged;
  return result;
}

}  // namespace vin
