#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vin/executor.hpp"
#include "vin/grid.hpp"
#include "vin/lattice.hpp"
#include "vin/planner.hpp"

namespace vin {

struct AgentSpec {
  Pose start;
  std::vector<Pose> goals;
};

struct CoopOptions {
  double collision_weight = 100.0;
  double temperature = 0.5;
  double step_size = 0.5;
  double idle_penalty = kDefaultIdlePenalty;
  int max_iters = 200;
  /// Soft collision level below which the ensemble counts as deconflicted.
  double collision_tol = 1e-4;
  /// Largest relative objective change tolerated over `window` iterations.
  double objective_rel_tol = 1e-5;
  int window = 5;
  /// Initial collision level below which the agents do not interact at all
  /// and the optimizer stops before touching the extrinsic costs.
  double interaction_floor = 1e-6;
};

struct CoopProblem {
  std::vector<AgentSpec> agents;
  Grid2 static_cost;
  TransitionModel model = build_default_model(8);
  int horizon = 0;
  CoopOptions options;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double collision = 0.0;
  double gradient_norm = 0.0;
};

struct CoopResult {
  std::vector<ExtrinsicCost> extrinsics;
  /// Exact-mode trajectories under the learned extrinsic costs.
  std::vector<Trajectory> trajectories;
  /// True cost of each exact trajectory, extrinsic cost excluded.
  std::vector<double> costs;
  std::vector<IterationRecord> trace;
  bool converged = false;
  /// Exact-mode collision loss of the final trajectories.
  double collision = 0.0;
  bool residual_collision = false;

  double ensemble_cost() const;
};

/// Pairwise overlap of orientation-marginal occupancies: same-timestep terms
/// plus the two cross-timestep terms that catch agents swapping cells.
/// Unweighted.
double collision_loss(std::span<const Trajectory> trajectories);

struct ObjectiveEvaluation {
  double objective = 0.0;
  double collision = 0.0;
  /// Expected true cost per agent under its soft trajectory.
  std::vector<double> true_costs;
  /// d objective / d extrinsic, per agent; empty unless requested.
  std::vector<ExtrinsicCost> gradient;
  std::vector<Trajectory> trajectories;
};

/// Soft-mode objective: sum of expected true costs plus the weighted
/// collision loss. Throws InfeasibleError naming the first agent that cannot
/// reach its goals on its own.
ObjectiveEvaluation evaluate_objective(const CoopProblem& problem,
                                       const std::vector<ExtrinsicCost>& extrinsics,
                                       bool with_gradient);

double objective(const CoopProblem& problem, const std::vector<ExtrinsicCost>& extrinsics);

/// Gradient descent on per-agent extrinsic costs, followed by exact-mode
/// replanning under the learned costs. Non-convergence is reported through
/// the result, not thrown.
CoopResult optimize(const CoopProblem& problem,
                    const std::function<void(const IterationRecord&)>& on_iteration = {});

/// Plans and traces every agent in exact mode under the given extrinsics.
CoopResult execute_exact(const CoopProblem& problem, std::vector<ExtrinsicCost> extrinsics);

}  // namespace vin
