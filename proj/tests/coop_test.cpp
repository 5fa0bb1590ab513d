#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vin/coop.hpp"
#include "vin/oracle.hpp"

using namespace vin;
using vin::testing::any_heading;
using vin::testing::load_fixture;

namespace {

Trajectory one_hot_path(const std::vector<Pose>& poses, int w, int h, int o) {
  Trajectory tr;
  for (const Pose& p : poses) {
    Grid3 g(w, h, o);
    g(p.x, p.y, p.theta) = 1.0;
    tr.states.push_back(g);
  }
  tr.decoded = poses;
  return tr;
}

Trajectory random_soft(int horizon, int w, int h, int o, std::mt19937& rng) {
  Trajectory tr;
  for (int t = 0; t <= horizon; ++t) {
    tr.states.push_back(vin::testing::random_distribution(w, h, o, rng));
  }
  return tr;
}

double soft_goal_cost(const CoopProblem& prob, std::size_t i) {
  const Planner p(prob.model, prob.static_cost, prob.horizon,
                  {PoolMode::kSoft, prob.options.temperature, prob.options.idle_penalty});
  const auto& a = prob.agents[i];
  const int w = prob.static_cost.width(), h = prob.static_cost.height();
  return goal_cost(p.plan(a.start, a.goals, ExtrinsicCost::zeros(prob.horizon, w, h)), a.goals);
}

std::vector<ExtrinsicCost> zeros(const CoopProblem& prob) {
  return std::vector<ExtrinsicCost>(
      prob.agents.size(),
      ExtrinsicCost::zeros(prob.horizon, prob.static_cost.width(), prob.static_cost.height()));
}

// Two robots head-on in the middle row of an open 5x3 map.
CoopProblem head_on(int horizon) {
  CoopProblem prob;
  prob.model = build_default_model(4);
  prob.static_cost = Grid2(5, 3);
  prob.horizon = horizon;
  prob.agents = {{{0, 1, 0}, any_heading(4, 1, 4)}, {{4, 1, 2}, any_heading(0, 1, 4)}};
  return prob;
}

CoopProblem relabeled(CoopProblem prob) {
  std::swap(prob.agents[0], prob.agents[1]);
  return prob;
}

}  // namespace

TEST(Collision, DisjointIsZero) {
  const auto a = one_hot_path({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 4, 3, 8);
  const auto b = one_hot_path({{0, 2, 0}, {1, 2, 0}, {2, 2, 0}}, 4, 3, 8);
  const Trajectory both[] = {a, b};
  EXPECT_EQ(collision_loss(both), 0.0);
}

TEST(Collision, SwapCountsTwiceAcrossTimesteps) {
  const auto a = one_hot_path({{0, 0, 0}, {1, 0, 0}}, 3, 1, 8);
  const auto b = one_hot_path({{1, 0, 4}, {0, 0, 4}}, 3, 1, 8);
  const Trajectory both[] = {a, b};
  EXPECT_EQ(collision_loss(both), 2.0);
  // Same-time overlap alone.
  const auto c = one_hot_path({{2, 0, 4}, {1, 0, 4}}, 3, 1, 8);
  const Trajectory meet[] = {a, c};
  EXPECT_EQ(collision_loss(meet), 1.0);
}

TEST(Collision, MatchesQuadrupleLoop) {
  std::mt19937 rng(301);
  const int horizon = 5, w = 4, h = 3, o = 8;
  std::vector<Trajectory> trs;
  for (int i = 0; i < 3; ++i) trs.push_back(random_soft(horizon, w, h, o, rng));
  double ref = 0.0;
  for (std::size_t i = 0; i < trs.size(); ++i) {
    for (std::size_t j = i + 1; j < trs.size(); ++j) {
      for (int t = 0; t <= horizon; ++t) {
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            double oi = 0, oj = 0, oi_prev = 0, oj_prev = 0;
            for (int k = 0; k < o; ++k) {
              oi += trs[i].states[t](x, y, k);
              oj += trs[j].states[t](x, y, k);
              if (t > 0) {
                oi_prev += trs[i].states[t - 1](x, y, k);
                oj_prev += trs[j].states[t - 1](x, y, k);
              }
            }
            ref += oi * oj + oi * oj_prev + oi_prev * oj;
          }
        }
      }
    }
  }
  EXPECT_NEAR(collision_loss(trs), ref, 1e-10);
}

TEST(Collision, HorizonMismatchThrows) {
  std::mt19937 rng(302);
  const Trajectory both[] = {random_soft(3, 2, 2, 4, rng), random_soft(4, 2, 2, 4, rng)};
  EXPECT_THROW(collision_loss(both), ConfigurationError);
}

TEST(Objective, SingleAgentIsSoftGoalCost) {
  CoopProblem prob = head_on(6);
  prob.agents.pop_back();
  const ObjectiveEvaluation ev = evaluate_objective(prob, zeros(prob), false);
  EXPECT_EQ(ev.collision, 0.0);
  EXPECT_NEAR(ev.objective, soft_goal_cost(prob, 0), 1e-9);
}

TEST(Objective, FarApartAgentsAddUp) {
  const Scenario sc = load_fixture("non_interference");
  const CoopProblem prob = sc.problem();
  const ObjectiveEvaluation ev = evaluate_objective(prob, zeros(prob), false);
  EXPECT_LT(ev.collision, 1e-6);
  EXPECT_NEAR(ev.true_costs[0], soft_goal_cost(prob, 0), 1e-9);
  EXPECT_NEAR(ev.true_costs[1], soft_goal_cost(prob, 1), 1e-9);
  EXPECT_NEAR(ev.objective,
              ev.true_costs[0] + ev.true_costs[1] + prob.options.collision_weight * ev.collision,
              1e-9);
}

TEST(Objective, NarrowingStartsInCollision) {
  const Scenario sc = load_fixture("narrowing");
  CoopProblem prob = sc.problem();
  prob.options.temperature = 0.5;
  const ObjectiveEvaluation ev = evaluate_objective(prob, zeros(prob), false);
  // Regression baseline at tau = 0.5.
  EXPECT_NEAR(ev.collision, 1.99159, 1e-4);
  EXPECT_NEAR(objective(prob, zeros(prob)), ev.objective, 1e-12);
}

TEST(Objective, ExtrinsicsAreNotCountedAsCost) {
  // A one-row corridor walked in exactly its length leaves a single path.
  CoopProblem prob;
  prob.model = build_default_model(8);
  prob.static_cost = Grid2(5, 1);
  prob.horizon = 4;
  prob.agents = {{{0, 0, 0}, any_heading(4, 0, 8)}};
  auto ext = zeros(prob);
  for (Grid2& g : ext[0].steps) g = Grid2(5, 1, 3.0);
  const ObjectiveEvaluation ev = evaluate_objective(prob, ext, false);
  EXPECT_NEAR(ev.true_costs[0], 8.0, 1e-9);
  EXPECT_NEAR(ev.objective, 8.0, 1e-9);
}

TEST(Objective, InfeasibleAgentIsNamed) {
  CoopProblem prob = head_on(2);  // four cells away, two steps
  try {
    evaluate_objective(prob, zeros(prob), false);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.agent(), 0);
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  CoopProblem prob = head_on(6);
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  auto ext = zeros(prob);
  for (auto& e : ext) {
    for (Grid2& g : e.steps) {
      for (double& v : g.storage()) v = d(rng);
    }
  }
  const ObjectiveEvaluation ev = evaluate_objective(prob, ext, true);
  ASSERT_GT(ev.collision, 1e-3);
  const double h = 1e-4;
  for (std::size_t i = 0; i < ext.size(); ++i) {
    for (int t = 0; t < prob.horizon; ++t) {
      for (std::size_t k = 0; k < ext[i].steps[t].size(); ++k) {
        auto up = ext, down = ext;
        up[i].steps[t][k] += h;
        down[i].steps[t][k] -= h;
        const double fd = (objective(prob, up) - objective(prob, down)) / (2 * h);
        EXPECT_TRUE(vin::testing::close_relative(ev.gradient[i].steps[t][k], fd, 1e-4, 1e-7))
            << "agent " << i << " t " << t << " cell " << k << ": " << ev.gradient[i].steps[t][k]
            << " vs " << fd;
      }
    }
  }
}

TEST(Objective, ShapeChecks) {
  const CoopProblem prob = head_on(6);
  auto ext = zeros(prob);
  ext.pop_back();
  EXPECT_THROW(evaluate_objective(prob, ext, false), ConfigurationError);
  ext = zeros(prob);
  ext[1].steps.pop_back();
  EXPECT_THROW(evaluate_objective(prob, ext, false), ConfigurationError);
}

TEST(Optimize, DisjointAgentsStopImmediately) {
  const Scenario sc = load_fixture("non_interference");
  const CoopProblem prob = sc.problem();
  const CoopResult r = optimize(prob);
  EXPECT_TRUE(r.converged);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_LT(r.trace[0].collision, prob.options.interaction_floor);
  for (const auto& e : r.extrinsics) EXPECT_EQ(e.max_abs(), 0.0);
  EXPECT_EQ(r.collision, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = prob.agents[i];
    const oracle::TimeExpandedGraph g(prob.model, prob.static_cost, prob.horizon, a.goals);
    double best = kInfCost;
    for (const Pose& goal : a.goals) {
      best = std::min(best, oracle::shortest_cost(g, a.start, goal, prob.horizon));
    }
    EXPECT_NEAR(r.costs[i], best, 1e-6);
  }
}

TEST(Optimize, NarrowingNearerAgentGoesFirst) {
  const Scenario sc = load_fixture("narrowing");
  const CoopResult r = optimize(sc.problem());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.collision, 0.0);
  EXPECT_FALSE(r.residual_collision);
  EXPECT_LE(r.trace.size(), 200u);
  EXPECT_TRUE(vin::testing::nearer_agent_passes_first(sc, r.trajectories));
}

TEST(Optimize, PassingPlaceIsUsed) {
  const Scenario sc = load_fixture("passing_place");
  const CoopResult r = optimize(sc.problem());
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.collision, 0.0);
  const std::vector<std::pair<int, int>> pocket{{5, 1}, {6, 1}};
  const auto corridor = vin::testing::narrowing_cells(sc);
  bool yielded = false;
  for (int t = 0; t <= r.trajectories[0].horizon(); ++t) {
    const Pose& a = r.trajectories[0].decoded[t];
    const Pose& b = r.trajectories[1].decoded[t];
    const bool a_in_pocket = std::count(pocket.begin(), pocket.end(), std::pair{a.x, a.y}) > 0;
    const bool b_in_narrowing =
        std::count(corridor.begin(), corridor.end(), std::pair{b.x, b.y}) > 0;
    yielded |= a_in_pocket && b_in_narrowing;
  }
  EXPECT_TRUE(yielded);
}

TEST(Optimize, ObjectiveTrendsDown) {
  const Scenario sc = load_fixture("narrowing");
  const CoopResult r = optimize(sc.problem());
  ASSERT_TRUE(r.converged);
  ASSERT_GE(r.trace.size(), 11u);
  double prev = 0;
  for (std::size_t k = 0; k + 10 <= r.trace.size(); ++k) {
    double avg = 0;
    for (std::size_t j = k; j < k + 10; ++j) avg += r.trace[j].objective / 10.0;
    if (k > 0) EXPECT_LE(avg, prev + 1e-9) << "window " << k;
    prev = avg;
  }
}

TEST(Optimize, RelabelingKeepsEnsembleCost) {
  for (const char* name : {"narrowing", "passing_place", "reduced_passing_place"}) {
    const CoopProblem prob = load_fixture(name).problem();
    const CoopResult a = optimize(prob);
    const CoopResult b = optimize(relabeled(prob));
    EXPECT_NEAR(a.ensemble_cost(), b.ensemble_cost(), 1e-6) << name;
  }
}

TEST(Optimize, NearJointOptimumOnSmallInstances) {
  for (const char* name : {"reduced_narrowing", "reduced_passing_place"}) {
    const CoopProblem prob = load_fixture(name).problem();
    const CoopResult r = optimize(prob);
    const oracle::JointSolution best = oracle::joint_optimum(prob);
    ASSERT_TRUE(best.feasible) << name;
    EXPECT_TRUE(r.converged) << name;
    EXPECT_EQ(r.collision, 0.0) << name;
    EXPECT_GE(r.ensemble_cost(), best.cost - 1e-9) << name;
    EXPECT_LE(r.ensemble_cost(), 1.1 * best.cost) << name;
  }
}

TEST(Optimize, NonConvergenceIsReportedNotThrown) {
  CoopProblem prob = load_fixture("narrowing").problem();
  prob.options.max_iters = 3;
  const CoopResult r = optimize(prob);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trajectories.size(), 2u);
}

TEST(Optimize, ExtrinsicsStayNonNegative) {
  CoopProblem prob = load_fixture("narrowing").problem();
  prob.options.max_iters = 20;
  for (const auto& e : optimize(prob).extrinsics) {
    for (const Grid2& g : e.steps) {
      for (double v : g.data()) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(Optimize, NeedsTwoAgents) {
  CoopProblem prob = head_on(6);
  prob.agents.pop_back();
  EXPECT_THROW(optimize(prob), ConfigurationError);
  prob = head_on(6);
  prob.options.collision_weight = 0.0;
  EXPECT_THROW(optimize(prob), ConfigurationError);
}
