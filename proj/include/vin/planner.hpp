#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vin/grid.hpp"
#include "vin/lattice.hpp"
#include "vin/ops.hpp"
#include "vin/tape.hpp"

namespace vin {

inline constexpr double kDefaultIdlePenalty = 0.05;

enum class PoolMode { kSoft, kExact };

struct PlannerOptions {
  PoolMode mode = PoolMode::kExact;
  double temperature = 0.5;
  double idle_penalty = kDefaultIdlePenalty;
};

/// Total cost of the idle action taken at timestep t (arriving at t + 1):
/// zero inside a goal, otherwise the unit time cost plus a penalty that
/// decays linearly from `idle_penalty` at t = 0 to zero at the horizon.
double wait_cost(int t, int horizon, bool in_goal, double idle_penalty = kDefaultIdlePenalty);

/// Zero at `start`, kInfCost everywhere else.
Grid3 init_cost_grid(const Pose& start, const Bounds& bounds);

/// Learned, orientation-independent visitation cost. steps[t - 1] is added to
/// every state entered at timestep t, for t = 1..T.
struct ExtrinsicCost {
  std::vector<Grid2> steps;

  static ExtrinsicCost zeros(int horizon, int width, int height);
  int horizon() const { return static_cast<int>(steps.size()); }
  double max_abs() const;
  friend bool operator==(const ExtrinsicCost&, const ExtrinsicCost&) = default;
};

/// Output of forward value iteration through time.
struct CostVolume {
  Bounds bounds;
  int horizon = 0;
  PoolMode mode = PoolMode::kExact;
  double temperature = 0.0;
  /// Cost-to-come at t = 0..T.
  std::vector<Grid3> values;
  /// Action distribution that produced values[t]; policy[0] is empty.
  std::vector<Grid4> policy;
  /// First t at which some goal state has finite cost.
  std::optional<int> earliest_goal_time;
};

struct TapedVolume {
  std::vector<Tape::Var> values;
  std::vector<Tape::Var> policy;  // policy[0] unused
};

/// Value iteration over a fixed map, model and horizon. Construction builds
/// the filter tables once; planning calls are const and may run concurrently.
class Planner {
 public:
  Planner(TransitionModel model, Grid2 static_cost, int horizon, PlannerOptions options = {});

  const TransitionModel& model() const { return model_; }
  const TransitionModel& reversed_model() const { return reversed_; }
  const Bounds& bounds() const { return bounds_; }
  int horizon() const { return horizon_; }
  const PlannerOptions& options() const { return options_; }
  const Grid2& static_cost() const { return static_cost_; }
  const std::shared_ptr<const PredecessorTable>& forward_table() const { return forward_; }
  const std::shared_ptr<const PredecessorTable>& reverse_table() const { return reverse_; }

  /// Per-state flags for a goal set. Throws ScenarioError on out-of-map goals.
  std::vector<std::uint8_t> goal_mask(std::span<const Pose> goals) const;

  /// Action costs for transitions arriving at timestep t (1..T).
  ActionCosts step_costs(int t, const std::vector<std::uint8_t>& goal_mask) const;

  /// Cost of taking `action` from `from` to arrive at timestep t, excluding
  /// extrinsic cost. kInfCost if the move leaves the map.
  double transition_cost(const Pose& from, int action, int t,
                         const std::vector<std::uint8_t>& goal_mask) const;

  /// True cost of every (state, action) arrival at timestep t: action cost
  /// plus static map cost, no extrinsic cost, saturated at kInfCost.
  Grid4 arrival_costs(int t, const std::vector<std::uint8_t>& goal_mask) const;

  CostVolume plan(const Pose& start, std::span<const Pose> goals,
                  const ExtrinsicCost& extrinsic) const;

  /// Soft-mode value iteration recorded on `tape`; `extrinsic` holds one
  /// planar node per timestep 1..T.
  TapedVolume record(Tape& tape, const Pose& start, std::span<const Pose> goals,
                     std::span<const Tape::Var> extrinsic) const;

 private:
  void check_start(const Pose& start) const;

  TransitionModel model_;
  TransitionModel reversed_;
  Grid2 static_cost_;
  Bounds bounds_;
  int horizon_;
  PlannerOptions options_;
  std::shared_ptr<const PredecessorTable> forward_;
  std::shared_ptr<const PredecessorTable> reverse_;
};

/// Sorted, de-duplicated linear indices of a goal set.
std::vector<std::size_t> goal_states(const Bounds& bounds, std::span<const Pose> goals);

/// One-shot convenience wrapper around Planner.
CostVolume plan(const Pose& start, std::span<const Pose> goals, const Grid2& static_cost,
                const ExtrinsicCost& extrinsic, const TransitionModel& model, int horizon,
                PlannerOptions options = {});

/// Cost of reaching the goal set at the horizon: the minimum over goals, or
/// the softmin expectation in soft mode. Throws InfeasibleError when no goal
/// has finite cost.
double goal_cost(const CostVolume& volume, std::span<const Pose> goals);

}  // namespace vin
