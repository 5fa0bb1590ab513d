#pragma once

#include <span>
#include <vector>

#include "vin/grid.hpp"
#include "vin/lattice.hpp"
#include "vin/planner.hpp"
#include "vin/tape.hpp"

namespace vin {

/// A traced trajectory: one distribution over poses per timestep.
///
/// In soft mode the distributions are renormalized after every backward step,
/// so mass leaking through saturated transitions does not shrink them over
/// long horizons. The argmax is unaffected by this.
struct Trajectory {
  int agent_id = 0;
  PoolMode mode = PoolMode::kExact;
  /// Distribution over poses at t = 0..T.
  std::vector<Grid3> states;
  /// Pose chain traced back from the most probable final pose along the
  /// heaviest incoming action (lowest action index on ties).
  std::vector<Pose> decoded;
  /// actions[t] leads from decoded[t] to decoded[t + 1].
  std::vector<int> actions;
  /// weights[t](s, a): mass at s at time t that arrived through action a.
  /// weights[0] is empty.
  std::vector<Grid4> weights;

  int horizon() const { return static_cast<int>(states.size()) - 1; }
};

/// Traces the policy of `volume` backward from the goal set at the horizon to
/// the start. Exact volumes start from the cheapest goal, soft volumes from a
/// softmin mixture over the goals.
///
/// Throws InfeasibleError if no goal has finite cost at the horizon and
/// NumericalCollapseError if the traced mass vanishes.
Trajectory backtrace(const CostVolume& volume, std::span<const Pose> goals,
                     const TransitionModel& model, int agent_id = 0);

struct TapedTrajectory {
  std::vector<Tape::Var> states;   // t = 0..T
  std::vector<Tape::Var> weights;  // weights[0] unused
};

/// Differentiable soft backtrace of a recorded volume.
TapedTrajectory record_backtrace(Tape& tape, const TapedVolume& volume,
                                 const std::vector<std::size_t>& goal_states,
                                 const Planner& planner);

/// Rebuilds an eager trajectory from recorded values.
Trajectory read_trajectory(const Tape& tape, const TapedTrajectory& taped,
                           const Planner& planner, int agent_id, PoolMode mode);

/// Orientation-marginal occupancy at timestep t.
Grid2 soft_occupancy(const Trajectory& trajectory, int t);

/// Sum of true transition costs along the decoded pose sequence, optionally
/// including extrinsic cost.
double decoded_cost(const Trajectory& trajectory, const Planner& planner,
                    std::span<const Pose> goals, const ExtrinsicCost* extrinsic = nullptr);

}  // namespace vin
