#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vin/coop.hpp"
#include "vin/grid.hpp"
#include "vin/lattice.hpp"
#include "vin/planner.hpp"

namespace vin::oracle {

/// Explicit graph over (x, y, theta, t) nodes. Every edge advances t by one;
/// its weight is the full cost of entering the target node.
class TimeExpandedGraph {
 public:
  struct Edge {
    std::size_t target;
    double cost;
  };

  /// `extrinsic` may be null (treated as zero).
  TimeExpandedGraph(const TransitionModel& model, const Grid2& static_cost, int horizon,
                    const std::vector<Pose>& goals, double idle_penalty = kDefaultIdlePenalty,
                    const ExtrinsicCost* extrinsic = nullptr);

  const Bounds& bounds() const { return bounds_; }
  int horizon() const { return horizon_; }
  std::size_t node_count() const { return edges_.size(); }
  std::size_t node(const Pose& p, int t) const {
    return static_cast<std::size_t>(t) * bounds_.state_count() + bounds_.index(p);
  }
  const std::vector<Edge>& edges(std::size_t node) const { return edges_[node]; }

 private:
  Bounds bounds_;
  int horizon_;
  std::vector<std::vector<Edge>> edges_;
};

/// Dijkstra from (start, 0). Entry per node; unreachable nodes hold kInfCost.
std::vector<double> shortest_costs(const TimeExpandedGraph& graph, const Pose& start);

/// Minimal cost of a path of exactly t steps from start to goal.
double shortest_cost(const TimeExpandedGraph& graph, const Pose& start, const Pose& goal, int t);

/// Same quantity by exhaustive recursion over action sequences. Exponential;
/// meant for grids of a dozen cells.
double enumerate_cost(const TransitionModel& model, const Grid2& static_cost, int horizon,
                      const std::vector<Pose>& goals, double idle_penalty, const Pose& start,
                      const Pose& goal, int t);

struct JointSolution {
  bool feasible = false;
  double cost = kInfCost;
  std::array<double, 2> agent_costs{kInfCost, kInfCost};
  std::array<std::vector<Pose>, 2> paths;
};

/// Exhaustive search over the product of two agents' time-expanded graphs.
/// Joint moves that put both agents in one cell at the same timestep, or one
/// agent into the cell the other held a step earlier, are excluded, which is
/// exactly the support of the collision loss. Refuses (RefusalError) when
/// W*H*Theta > 64 or T > 8.
JointSolution joint_optimum(const CoopProblem& problem);

}  // namespace vin::oracle
