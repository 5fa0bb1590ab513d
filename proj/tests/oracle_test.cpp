#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vin/oracle.hpp"

using namespace vin;
using vin::testing::any_heading;
using vin::testing::load_fixture;

TEST(Oracle, ShortestCostExamples) {
  const TransitionModel m = build_default_model(8);
  const Grid2 open(5, 3);
  const std::vector<Pose> goals{{3, 1, 0}};
  const oracle::TimeExpandedGraph g(m, open, 4, goals);
  EXPECT_EQ(oracle::shortest_cost(g, {2, 1, 0}, {2, 1, 0}, 0), 0.0);
  EXPECT_EQ(oracle::shortest_cost(g, {2, 1, 0}, {3, 1, 0}, 1), 2.0);
  // Already at the goal: idling there is free.
  EXPECT_EQ(oracle::shortest_cost(g, {3, 1, 0}, {3, 1, 0}, 4), 0.0);
  // Cannot reach a cell four columns away in one step.
  EXPECT_EQ(oracle::shortest_cost(g, {0, 1, 0}, {4, 1, 0}, 1), kInfCost);
}

TEST(Oracle, GraphShape) {
  const TransitionModel m = build_default_model(8);
  const oracle::TimeExpandedGraph g(m, Grid2(4, 3), 5, {{1, 1, 0}});
  EXPECT_EQ(g.node_count(), 4u * 3u * 8u * 6u);
  const std::size_t per_layer = g.bounds().state_count();
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const std::size_t t = n / per_layer;
    if (t == 5) {
      EXPECT_TRUE(g.edges(n).empty());
      continue;
    }
    EXPECT_FALSE(g.edges(n).empty());  // waiting is always possible
    for (const auto& e : g.edges(n)) EXPECT_EQ(e.target / per_layer, t + 1);
  }
}

TEST(Oracle, DijkstraSatisfiesBellman) {
  std::mt19937 rng(401);
  const TransitionModel m = build_default_model(8);
  const Grid2 map = vin::testing::random_map(5, 4, 0.2, rng, {{0, 0}, {4, 3}});
  const auto goals = any_heading(4, 3, 8);
  const oracle::TimeExpandedGraph g(m, map, 7, goals);
  const std::vector<double> d = oracle::shortest_costs(g, {0, 0, 0});
  std::vector<double> relaxed(d.size(), kInfCost);
  relaxed[g.node({0, 0, 0}, 0)] = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (d[n] >= kInfCost) continue;
    for (const auto& e : g.edges(n)) {
      relaxed[e.target] = std::min(relaxed[e.target], std::min(kInfCost, d[n] + e.cost));
    }
  }
  for (std::size_t n = 0; n < d.size(); ++n) EXPECT_NEAR(d[n], relaxed[n], 1e-9) << n;
}

TEST(Oracle, RecursionAgreesWithDijkstra) {
  std::mt19937 rng(402);
  const TransitionModel m = build_default_model(8);
  std::uniform_int_distribution<int> dx(0, 3), dy(0, 2), dt(0, 7);
  for (int trial = 0; trial < 15; ++trial) {
    const Pose start{dx(rng), dy(rng), dt(rng)};
    const Pose goal{dx(rng), dy(rng), dt(rng)};
    const Grid2 map =
        vin::testing::random_map(4, 3, 0.2, rng, {{start.x, start.y}, {goal.x, goal.y}});
    const std::vector<Pose> goals{goal};
    const oracle::TimeExpandedGraph g(m, map, 5, goals);
    for (int t = 0; t <= 5; ++t) {
      EXPECT_NEAR(oracle::shortest_cost(g, start, goal, t),
                  oracle::enumerate_cost(m, map, 5, goals, kDefaultIdlePenalty, start, goal, t),
                  1e-9)
          << "trial " << trial << " t " << t;
    }
  }
}

TEST(JointOptimum, DisjointRowsAddUp) {
  CoopProblem prob;
  prob.model = build_default_model(4);
  prob.static_cost = Grid2(5, 3);
  prob.horizon = 6;
  prob.agents = {{{0, 0, 0}, any_heading(4, 0, 4)}, {{4, 2, 2}, any_heading(0, 2, 4)}};
  const oracle::JointSolution s = oracle::joint_optimum(prob);
  ASSERT_TRUE(s.feasible);
  // Four straight steps each: movement 4 plus time 4.
  EXPECT_NEAR(s.cost, 16.0, 1e-9);
  EXPECT_NEAR(s.agent_costs[0], 8.0, 1e-9);
  EXPECT_NEAR(s.agent_costs[1], 8.0, 1e-9);
  EXPECT_EQ(s.paths[0].size(), 7u);
}

TEST(JointOptimum, PocketLetsAgentsPass) {
  const Scenario with = load_fixture("reduced_passing_place");
  const Scenario without = load_fixture("reduced_narrowing");
  const oracle::JointSolution a = oracle::joint_optimum(with.problem());
  const oracle::JointSolution b = oracle::joint_optimum(without.problem());
  ASSERT_TRUE(a.feasible);
  ASSERT_TRUE(b.feasible);
  EXPECT_LT(a.cost, b.cost - 1e-6);
  bool pocket_used = false;
  for (const auto& path : a.paths) {
    for (const Pose& p : path) pocket_used |= p.x == 2 && p.y == 2;
  }
  EXPECT_TRUE(pocket_used);
  // Paths obey the exclusion rule.
  for (std::size_t t = 0; t < a.paths[0].size(); ++t) {
    const Pose& p = a.paths[0][t];
    const Pose& q = a.paths[1][t];
    EXPECT_FALSE(p.x == q.x && p.y == q.y) << t;
    if (t > 0) {
      EXPECT_FALSE(p.x == a.paths[1][t - 1].x && p.y == a.paths[1][t - 1].y) << t;
      EXPECT_FALSE(q.x == a.paths[0][t - 1].x && q.y == a.paths[0][t - 1].y) << t;
    }
  }
}

TEST(JointOptimum, SingleFileCorridorIsInfeasible) {
  CoopProblem prob;
  prob.model = build_default_model(4);
  prob.static_cost = Grid2(5, 1);
  prob.horizon = 8;
  prob.agents = {{{0, 0, 0}, any_heading(4, 0, 4)}, {{4, 0, 2}, any_heading(0, 0, 4)}};
  const oracle::JointSolution s = oracle::joint_optimum(prob);
  EXPECT_FALSE(s.feasible);
  EXPECT_EQ(s.cost, kInfCost);
}

TEST(JointOptimum, RefusesLargeInstances) {
  CoopProblem big = load_fixture("narrowing").problem();
  EXPECT_THROW(oracle::joint_optimum(big), RefusalError);
  CoopProblem long_horizon = load_fixture("reduced_narrowing").problem();
  long_horizon.horizon = 9;
  EXPECT_THROW(oracle::joint_optimum(long_horizon), RefusalError);
}

TEST(JointOptimum, SymmetricUnderRelabeling) {
  CoopProblem prob = load_fixture("reduced_passing_place").problem();
  const double forward = oracle::joint_optimum(prob).cost;
  std::swap(prob.agents[0], prob.agents[1]);
  EXPECT_NEAR(oracle::joint_optimum(prob).cost, forward, 1e-9);
}
