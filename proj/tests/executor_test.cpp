#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vin/executor.hpp"

using namespace vin;
using vin::testing::any_heading;
using vin::testing::random_map;

namespace {

constexpr int kStraight = 0;
constexpr int kWait = 3;

Trajectory exact_trace(const Planner& p, const Pose& start, const std::vector<Pose>& goals,
                       const ExtrinsicCost& e) {
  return backtrace(p.plan(start, goals, e), goals, p.model());
}

}  // namespace

TEST(Executor, GoalAtStartWaitsThroughout) {
  const Planner p(build_default_model(8), Grid2(5, 5), 6);
  const std::vector<Pose> goals{{2, 2, 1}};
  const Trajectory tr = exact_trace(p, {2, 2, 1}, goals, ExtrinsicCost::zeros(6, 5, 5));
  ASSERT_EQ(tr.actions.size(), 6u);
  for (int a : tr.actions) EXPECT_EQ(a, kWait);
  for (const Pose& q : tr.decoded) EXPECT_EQ(q, (Pose{2, 2, 1}));
}

TEST(Executor, CorridorRunsThenIdlesAtGoal) {
  const Planner p(build_default_model(8), Grid2(15, 5), 15);
  const std::vector<Pose> goals{{13, 2, 0}};
  const Trajectory tr = exact_trace(p, {1, 2, 0}, goals, ExtrinsicCost::zeros(15, 15, 5));
  for (int t = 0; t < 12; ++t) EXPECT_EQ(tr.actions[t], kStraight) << t;
  for (int t = 12; t < 15; ++t) EXPECT_EQ(tr.actions[t], kWait) << t;
  EXPECT_EQ(tr.decoded.front(), (Pose{1, 2, 0}));
  EXPECT_EQ(tr.decoded[12], (Pose{13, 2, 0}));
  EXPECT_DOUBLE_EQ(decoded_cost(tr, p, goals, nullptr), 24.0);
}

TEST(Executor, TurnaroundLoopsForward) {
  const Scenario sc = vin::testing::load_fixture("turnaround");
  const CoopProblem prob = sc.problem();
  const Planner p(prob.model, prob.static_cost, prob.horizon);
  const auto& a = prob.agents[0];
  const Trajectory tr =
      exact_trace(p, a.start, a.goals, ExtrinsicCost::zeros(prob.horizon, sc.width(), sc.height()));
  int turns = 0;
  for (int t = 0; t < tr.horizon(); ++t) {
    EXPECT_EQ(prob.model.apply(tr.decoded[t], tr.actions[t]), tr.decoded[t + 1]);
    turns += tr.decoded[t].theta != tr.decoded[t + 1].theta;
  }
  EXPECT_EQ(tr.decoded.back(), a.goals.front());
  EXPECT_GE(turns, 4);
}

TEST(Executor, ExactReplayAndOptimality) {
  std::mt19937 rng(201);
  const TransitionModel model = build_default_model(8);
  std::uniform_int_distribution<int> dx(0, 7), dy(0, 5), dt(0, 7);
  std::uniform_real_distribution<double> de(0.0, 1.5);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Pose start{dx(rng), dy(rng), dt(rng)};
    const int gx = dx(rng), gy = dy(rng);
    const Grid2 map = random_map(8, 6, 0.2, rng, {{start.x, start.y}, {gx, gy}});
    ExtrinsicCost e = ExtrinsicCost::zeros(12, 8, 6);
    for (Grid2& g : e.steps) {
      for (double& v : g.storage()) v = de(rng);
    }
    const Planner p(model, map, 12);
    const auto goals = any_heading(gx, gy, 8);
    const CostVolume v = p.plan(start, goals, e);
    double best;
    try {
      best = goal_cost(v, goals);
    } catch (const InfeasibleError&) {
      EXPECT_THROW(backtrace(v, goals, model), InfeasibleError);
      continue;
    }
    const Trajectory tr = backtrace(v, goals, model);
    EXPECT_EQ(tr.decoded.front(), start);
    for (int t = 0; t < 12; ++t) {
      EXPECT_EQ(model.apply(tr.decoded[t], tr.actions[t]), tr.decoded[t + 1]);
    }
    EXPECT_NEAR(decoded_cost(tr, p, goals, &e), best, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Executor, SoftMassIsConserved) {
  std::mt19937 rng(202);
  const Grid2 map = random_map(8, 6, 0.15, rng, {{0, 0}, {7, 5}});
  const Planner p(build_default_model(8), map, 14, {PoolMode::kSoft, 0.5});
  const auto goals = any_heading(7, 5, 8);
  const CostVolume v = p.plan({0, 0, 7}, goals, ExtrinsicCost::zeros(14, 8, 6));
  const Trajectory tr = backtrace(v, goals, p.model());
  for (int t = 0; t <= 14; ++t) {
    EXPECT_TRUE(tr.states[t].is_distribution(1e-9)) << t;
    const Grid2 occ = soft_occupancy(tr, t);
    double total = 0;
    for (double o : occ.data()) total += o;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
  EXPECT_EQ(tr.states[0](0, 0, 7), 1.0);
}

TEST(Executor, SoftDecodingIsAFeasibleChain) {
  const Planner p(build_default_model(8), Grid2(15, 5), 20, {PoolMode::kSoft, 0.8});
  const auto goals = any_heading(3, 4, 8);
  const Trajectory tr = backtrace(p.plan({12, 0, 4}, goals, ExtrinsicCost::zeros(20, 15, 5)),
                                  goals, p.model());
  EXPECT_EQ(tr.decoded.front(), (Pose{12, 0, 4}));
  for (int t = 0; t < 20; ++t) {
    EXPECT_EQ(p.model().apply(tr.decoded[t], tr.actions[t]), tr.decoded[t + 1]);
  }
}

TEST(Executor, SoftOccupancyMatchesLoop) {
  std::mt19937 rng(203);
  Trajectory tr;
  tr.states.push_back(vin::testing::random_distribution(4, 3, 8, rng));
  const Grid2 o = soft_occupancy(tr, 0);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) {
      double ref = 0;
      for (int t = 0; t < 8; ++t) ref += tr.states[0](x, y, t);
      EXPECT_NEAR(o(x, y), ref, 1e-12);
    }
  }
  EXPECT_THROW(soft_occupancy(tr, 1), ConfigurationError);
  Grid3 one(4, 3, 8);
  one(1, 2, 5) = 1.0;
  tr.states[0] = one;
  const Grid2 hot = soft_occupancy(tr, 0);
  EXPECT_EQ(hot(1, 2), 1.0);
  EXPECT_EQ(frobenius(hot, hot), 1.0);
}

TEST(Executor, SoftArgmaxMatchesExactAtLowTemperature) {
  for (const char* name : {"turnaround", "narrowing", "non_interference", "passing_place",
                           "unreachable_pocket"}) {
    const Scenario sc = vin::testing::load_fixture(name);
    const CoopProblem prob = sc.problem();
    const Planner exact(prob.model, prob.static_cost, prob.horizon);
    const Planner soft(prob.model, prob.static_cost, prob.horizon, {PoolMode::kSoft, 1e-3});
    const auto zero = ExtrinsicCost::zeros(prob.horizon, sc.width(), sc.height());
    for (const auto& a : prob.agents) {
      const Trajectory te = exact_trace(exact, a.start, a.goals, zero);
      const Trajectory ts = exact_trace(soft, a.start, a.goals, zero);
      EXPECT_EQ(ts.decoded, te.decoded) << name;
      EXPECT_EQ(ts.actions, te.actions) << name;
    }
  }
}

TEST(Executor, IncompleteVolumeRejected) {
  CostVolume v;
  v.horizon = 3;
  const std::vector<Pose> goals{{0, 0, 0}};
  EXPECT_THROW(backtrace(v, goals, build_default_model(8)), ConfigurationError);
}
