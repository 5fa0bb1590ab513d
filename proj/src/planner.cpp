#include "vin/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vin {

double wait_cost(int t, int horizon, bool in_goal, double idle_penalty) {
  if (in_goal) return 0.0;
  if (horizon <= 0) return 1.0;
  return 1.0 + idle_penalty * static_cast<double>(horizon - t) / horizon;
}

Grid3 init_cost_grid(const Pose& start, const Bounds& bounds) {
  if (!bounds.contains(start)) {
    throw ScenarioError("start pose lies outside the map");
  }
  Grid3 g(bounds.width, bounds.height, bounds.orientations, kInfCost);
  g[bounds.index(start)] = 0.0;
  return g;
}

ExtrinsicCost ExtrinsicCost::zeros(int horizon, int width, int height) {
  return ExtrinsicCost{std::vector<Grid2>(static_cast<std::size_t>(horizon),
                                          Grid2(width, height, 0.0))};
}

double ExtrinsicCost::max_abs() const {
  double m = 0.0;
  for (const Grid2& g : steps) {
    for (double v : g.data()) m = std::max(m, std::abs(v));
  }
  return m;
}

Planner::Planner(TransitionModel model, Grid2 static_cost, int horizon,
                 PlannerOptions options)
    : model_(std::move(model)),
      reversed_(reverse_model(model_)),
      static_cost_(std::move(static_cost)),
      bounds_{static_cost_.width(), static_cost_.height(), model_.orientations()},
      horizon_(horizon),
      options_(options) {
  if (horizon_ < 0) throw ConfigurationError("horizon must be non-negative");
  if (options_.mode == PoolMode::kSoft && !(options_.temperature > 0.0)) {
    throw ConfigurationError("softmin temperature must be positive");
  }
  if (model_.wait_action() < 0) {
    throw ConfigurationError("transition model has no wait action");
  }
  for (double c : static_cost_.data()) {
    if (!(c >= 0.0)) throw ConfigurationError("static cost must be non-negative");
  }
  forward_ = std::make_shared<const PredecessorTable>(build_predecessor_table(model_, bounds_));
  reverse_ =
      std::make_shared<const PredecessorTable>(build_predecessor_table(reversed_, bounds_));
}

std::vector<std::uint8_t> Planner::goal_mask(std::span<const Pose> goals) const {
  if (goals.empty()) throw ScenarioError("goal set is empty");
  std::vector<std::uint8_t> mask(bounds_.state_count(), 0);
  for (const Pose& g : goals) {
    if (!bounds_.contains(g)) throw ScenarioError("goal pose lies outside the map");
    mask[bounds_.index(g)] = 1;
  }
  return mask;
}

ActionCosts Planner::step_costs(int t, const std::vector<std::uint8_t>& goal_mask) const {
  const int orientations = model_.orientations();
  const int actions = model_.action_count();
  ActionCosts costs;
  costs.idle_action = model_.wait_action();
  costs.free_idle = goal_mask;
  costs.by_heading.resize(static_cast<std::size_t>(orientations) * actions);
  for (int landing = 0; landing < orientations; ++landing) {
    for (int a = 0; a < actions; ++a) {
      // The reversed bank is indexed by the orientation a move lands in.
      const Filter& f = reversed_.filter(landing, a);
      costs.by_heading[static_cast<std::size_t>(landing) * actions + a] =
          a == costs.idle_action
              ? wait_cost(t - 1, horizon_, false, options_.idle_penalty)
              : f.movement_cost + model_.time_cost();
    }
  }
  return costs;
}

double Planner::transition_cost(const Pose& from, int action, int t,
                                const std::vector<std::uint8_t>& goal_mask) const {
  const Pose to = model_.apply(from, action);
  if (!bounds_.contains(to)) return kInfCost;
  if (action == model_.wait_action()) {
    const bool in_goal = !goal_mask.empty() && goal_mask[bounds_.index(to)] != 0;
    if (in_goal) return 0.0;
    return std::min(wait_cost(t - 1, horizon_, false, options_.idle_penalty) +
                        static_cost_(to.x, to.y),
                    kInfCost);
  }
  return std::min(model_.filter(from.theta, action).movement_cost + model_.time_cost() +
                      static_cost_(to.x, to.y),
                  kInfCost);
}

Grid4 Planner::arrival_costs(int t, const std::vector<std::uint8_t>& goal_mask) const {
  const Grid4 zero(bounds_.width, bounds_.height, bounds_.orientations, model_.action_count());
  return accumulate(zero, step_costs(t, goal_mask), static_cost_);
}

void Planner::check_start(const Pose& start) const {
  if (!bounds_.contains(start)) throw ScenarioError("start pose lies outside the map");
}

CostVolume Planner::plan(const Pose& start, std::span<const Pose> goals,
                         const ExtrinsicCost& extrinsic) const {
  check_start(start);
  if (extrinsic.horizon() != horizon_) {
    throw ConfigurationError("extrinsic cost must have one grid per timestep");
  }
  const auto mask = goal_mask(goals);

  CostVolume volume;
  volume.bounds = bounds_;
  volume.horizon = horizon_;
  volume.mode = options_.mode;
  volume.temperature = options_.temperature;
  volume.values.reserve(horizon_ + 1);
  volume.policy.reserve(horizon_ + 1);
  volume.values.push_back(init_cost_grid(start, bounds_));
  volume.policy.emplace_back();

  for (int t = 1; t <= horizon_; ++t) {
    const Grid2& ext = extrinsic.steps[t - 1];
    if (!ext.same_shape(static_cost_)) {
      throw ConfigurationError("extrinsic cost grid does not match the map");
    }
    Grid2 visit = static_cost_;
    for (std::size_t i = 0; i < visit.size(); ++i) visit[i] += ext[i];
    Grid4 q = accumulate(propagate(volume.values.back(), *forward_), step_costs(t, mask), visit);
    PoolResult pooled = options_.mode == PoolMode::kSoft
                            ? softmin_pool(q, options_.temperature)
                            : min_pool(q);
    volume.values.push_back(std::move(pooled.values));
    volume.policy.push_back(std::move(pooled.policy));
  }

  for (int t = 0; t <= horizon_ && !volume.earliest_goal_time; ++t) {
    for (const Pose& g : goals) {
      if (volume.values[t][bounds_.index(g)] < kInfCost) {
        volume.earliest_goal_time = t;
        break;
      }
    }
  }
  return volume;
}

TapedVolume Planner::record(Tape& tape, const Pose& start, std::span<const Pose> goals,
                            std::span<const Tape::Var> extrinsic) const {
  check_start(start);
  if (static_cast<int>(extrinsic.size()) != horizon_) {
    throw ConfigurationError("extrinsic cost must have one grid per timestep");
  }
  const auto mask = goal_mask(goals);
  const Tape::Var static_node = tape.constant(static_cost_);

  TapedVolume out;
  out.values.push_back(tape.constant(init_cost_grid(start, bounds_)));
  out.policy.push_back(Tape::Var{});
  for (int t = 1; t <= horizon_; ++t) {
    const Tape::Var visit = tape.add(static_node, extrinsic[t - 1]);
    const Tape::Var propagated = tape.propagate(out.values.back(), forward_);
    const Tape::Var q = tape.accumulate(propagated, step_costs(t, mask), visit);
    const Tape::Pooled pooled = options_.mode == PoolMode::kSoft
                                    ? tape.softmin_pool(q, options_.temperature)
                                    : tape.min_pool(q);
    out.values.push_back(pooled.values);
    out.policy.push_back(pooled.policy);
  }
  return out;
}

CostVolume plan(const Pose& start, std::span<const Pose> goals, const Grid2& static_cost,
                const ExtrinsicCost& extrinsic, const TransitionModel& model, int horizon,
                PlannerOptions options) {
  return Planner(model, static_cost, horizon, options).plan(start, goals, extrinsic);
}

std::vector<std::size_t> goal_states(const Bounds& bounds, std::span<const Pose> goals) {
  if (goals.empty()) throw ScenarioError("goal set is empty");
  std::vector<std::size_t> out;
  for (const Pose& g : goals) {
    if (!bounds.contains(g)) throw ScenarioError("goal pose lies outside the map");
    out.push_back(bounds.index(g));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double goal_cost(const CostVolume& volume, std::span<const Pose> goals) {
  if (volume.values.empty()) throw ConfigurationError("cost volume is empty");
  const auto states = goal_states(volume.bounds, goals);
  const Grid3& last = volume.values.back();
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t s : states) lowest = std::min(lowest, last[s]);
  if (!(lowest < kInfCost)) {
    throw InfeasibleError("no goal state is reachable within the horizon");
  }
  if (volume.mode == PoolMode::kExact) return lowest;
  double norm = 0.0;
  double expected = 0.0;
  for (std::size_t s : states) {
    const double v = last[s];
    const double w = std::exp(-(v - lowest) / volume.temperature);
    norm += w;
    expected += w * v;
  }
  return expected / norm;
}

}  // namespace vin
