#include "vin/executor.hpp"

#include <algorithm>
#include <cmath>

namespace vin {

namespace {

// Follows the heaviest incoming flow from the most likely final pose back to
// the start, so the decoded poses always form a feasible chain. Ties go to the
// lowest action index, the same rule min_pool applies.
void decode(Trajectory& traj, const Bounds& bounds, const PredecessorTable& forward) {
  const int horizon = traj.horizon();
  traj.decoded.resize(horizon + 1);
  traj.actions.assign(horizon, -1);
  std::size_t s = traj.states[horizon].argmax();
  traj.decoded[horizon] = bounds.pose(s);
  for (int t = horizon; t >= 1; --t) {
    const Grid4& w = traj.weights[t];
    int best = 0;
    for (int a = 1; a < w.actions(); ++a) {
      if (w.at(s, a) > w.at(s, best)) best = a;
    }
    const std::int32_t src = forward.at(s, best);
    if (src < 0 || !(w.at(s, best) > 0.0)) {
      throw NumericalCollapseError("backtrace lost all probability mass");
    }
    s = static_cast<std::size_t>(src);
    traj.actions[t - 1] = best;
    traj.decoded[t - 1] = bounds.pose(s);
  }
}

}  // namespace

Trajectory backtrace(const CostVolume& volume, std::span<const Pose> goals,
                     const TransitionModel& model, int agent_id) {
  const Bounds& bounds = volume.bounds;
  if (static_cast<int>(volume.values.size()) != volume.horizon + 1 ||
      volume.policy.size() != volume.values.size()) {
    throw ConfigurationError("cost volume is incomplete");
  }
  const auto goal_idx = goal_states(bounds, goals);
  const Grid3& last = volume.values.back();

  std::size_t best = goal_idx.front();
  for (std::size_t s : goal_idx) {
    if (last[s] < last[best]) best = s;
  }
  if (!(last[best] < kInfCost)) {
    throw InfeasibleError("goal is not reachable within the horizon", agent_id);
  }

  Grid3 state(bounds.width, bounds.height, bounds.orientations, 0.0);
  if (volume.mode == PoolMode::kExact) {
    state[best] = 1.0;
  } else {
    double norm = 0.0;
    for (std::size_t s : goal_idx) norm += std::exp(-(last[s] - last[best]) / volume.temperature);
    for (std::size_t s : goal_idx) {
      state[s] = std::exp(-(last[s] - last[best]) / volume.temperature) / norm;
    }
  }

  const PredecessorTable reverse = build_predecessor_table(reverse_model(model), bounds);
  Trajectory traj;
  traj.agent_id = agent_id;
  traj.mode = volume.mode;
  traj.states.resize(volume.horizon + 1);
  traj.weights.resize(volume.horizon + 1);
  traj.states[volume.horizon] = std::move(state);
  for (int t = volume.horizon; t >= 1; --t) {
    traj.weights[t] = weight_by_policy(traj.states[t], volume.policy[t]);
    traj.states[t - 1] = normalize(gather_actions(traj.weights[t], reverse));
  }
  decode(traj, bounds, build_predecessor_table(model, bounds));
  return traj;
}

TapedTrajectory record_backtrace(Tape& tape, const TapedVolume& volume,
                                 const std::vector<std::size_t>& goal_states,
                                 const Planner& planner) {
  const int horizon = static_cast<int>(volume.values.size()) - 1;
  const Grid3& last = tape.grid3(volume.values.back());
  double lowest = kInfCost;
  for (std::size_t s : goal_states) lowest = std::min(lowest, last[s]);
  if (!(lowest < kInfCost)) {
    throw InfeasibleError("goal is not reachable within the horizon");
  }

  TapedTrajectory out;
  out.states.resize(horizon + 1);
  out.weights.resize(horizon + 1);
  out.states[horizon] =
      tape.goal_mixture(volume.values.back(), goal_states, planner.options().temperature);
  for (int t = horizon; t >= 1; --t) {
    out.weights[t] = tape.weight_by_policy(out.states[t], volume.policy[t]);
    out.states[t - 1] =
        tape.normalize(tape.gather_actions(out.weights[t], planner.reverse_table()));
  }
  return out;
}

Trajectory read_trajectory(const Tape& tape, const TapedTrajectory& taped,
                           const Planner& planner, int agent_id, PoolMode mode) {
  Trajectory traj;
  traj.agent_id = agent_id;
  traj.mode = mode;
  const int horizon = static_cast<int>(taped.states.size()) - 1;
  traj.states.reserve(horizon + 1);
  traj.weights.resize(horizon + 1);
  for (int t = 0; t <= horizon; ++t) {
    traj.states.push_back(tape.grid3(taped.states[t]));
    if (t > 0) traj.weights[t] = tape.grid4(taped.weights[t]);
  }
  decode(traj, planner.bounds(), *planner.forward_table());
  return traj;
}

Grid2 soft_occupancy(const Trajectory& trajectory, int t) {
  if (t < 0 || t > trajectory.horizon()) {
    throw ConfigurationError("timestep outside the trajectory");
  }
  return marginalize_orientation(trajectory.states[t]);
}

double decoded_cost(const Trajectory& trajectory, const Planner& planner,
                    std::span<const Pose> goals, const ExtrinsicCost* extrinsic) {
  const auto mask = planner.goal_mask(goals);
  const Bounds& bounds = planner.bounds();
  double total = 0.0;
  for (int t = 1; t <= trajectory.horizon(); ++t) {
    const Pose& from = trajectory.decoded[t - 1];
    const int action = trajectory.actions[t - 1];
    total += planner.transition_cost(from, action, t, mask);
    const Pose to = planner.model().apply(from, action);
    const bool free_idle = action == planner.model().wait_action() && mask[bounds.index(to)];
    if (extrinsic && !free_idle) total += extrinsic->steps[t - 1](to.x, to.y);
  }
  return total;
}

}  // namespace vin
