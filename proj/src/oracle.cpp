#include "vin/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace vin::oracle {

namespace {

// Cost of entering `to` through `action` at timestep t. Infinite when the
// target is off-map or blocked.
double edge_cost(const TransitionModel& model, const Grid2& static_cost, int horizon,
                 double idle_penalty, const std::vector<std::uint8_t>& goal, const Bounds& b,
                 const Pose& from, int action, int t, const ExtrinsicCost* extrinsic) {
  const Pose to = model.apply(from, action);
  if (!b.contains(to)) return std::numeric_limits<double>::infinity();
  const double map_cost = static_cost(to.x, to.y);
  if (map_cost >= kInfCost) return std::numeric_limits<double>::infinity();
  const bool idle = model.action(action).kind == ActionKind::kWait;
  if (idle && goal[b.index(to)]) return 0.0;
  double cost = map_cost + model.time_cost();
  if (idle) {
    cost += idle_penalty * static_cast<double>(horizon - (t - 1)) / horizon;
  } else {
    cost += model.filter(from.theta, action).movement_cost;
  }
  if (extrinsic) cost += extrinsic->steps[t - 1](to.x, to.y);
  return cost;
}

std::vector<std::uint8_t> goal_flags(const Bounds& b, const std::vector<Pose>& goals) {
  std::vector<std::uint8_t> flags(b.state_count(), 0);
  for (const Pose& g : goals) flags[b.index(g)] = 1;
  return flags;
}

}  // namespace

TimeExpandedGraph::TimeExpandedGraph(const TransitionModel& model, const Grid2& static_cost,
                                     int horizon, const std::vector<Pose>& goals,
                                     double idle_penalty, const ExtrinsicCost* extrinsic)
    : bounds_{static_cost.width(), static_cost.height(), model.orientations()},
      horizon_(horizon) {
  const std::size_t states = bounds_.state_count();
  edges_.resize(states * (horizon + 1));
  const auto goal = goal_flags(bounds_, goals);
  for (int t = 0; t < horizon; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const Pose from = bounds_.pose(s);
      for (int a = 0; a < model.action_count(); ++a) {
        const double c = edge_cost(model, static_cost, horizon, idle_penalty, goal, bounds_,
                                   from, a, t + 1, extrinsic);
        if (c == std::numeric_limits<double>::infinity()) continue;
        edges_[node(from, t)].push_back({node(model.apply(from, a), t + 1), c});
      }
    }
  }
}

std::vector<double> shortest_costs(const TimeExpandedGraph& graph, const Pose& start) {
  std::vector<double> dist(graph.node_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const std::size_t source = graph.node(start, 0);
  dist[source] = 0.0;
  open.push({0.0, source});
  while (!open.empty()) {
    const auto [d, n] = open.top();
    open.pop();
    if (d > dist[n]) continue;
    for (const auto& e : graph.edges(n)) {
      if (d + e.cost < dist[e.target]) {
        dist[e.target] = d + e.cost;
        open.push({dist[e.target], e.target});
      }
    }
  }
  for (double& d : dist) d = std::min(d, kInfCost);
  return dist;
}

double shortest_cost(const TimeExpandedGraph& graph, const Pose& start, const Pose& goal,
                     int t) {
  return shortest_costs(graph, start)[graph.node(goal, t)];
}

double enumerate_cost(const TransitionModel& model, const Grid2& static_cost, int horizon,
                      const std::vector<Pose>& goals, double idle_penalty, const Pose& start,
                      const Pose& goal, int t) {
  const Bounds b{static_cost.width(), static_cost.height(), model.orientations()};
  const auto flags = goal_flags(b, goals);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(const Pose&, int, double)> walk = [&](const Pose& at, int step,
                                                          double cost) {
    if (step == t) {
      if (at == goal) best = std::min(best, cost);
      return;
    }
    for (int a = 0; a < model.action_count(); ++a) {
      const double c =
          edge_cost(model, static_cost, horizon, idle_penalty, flags, b, at, a, step + 1, nullptr);
      if (c == std::numeric_limits<double>::infinity()) continue;
      walk(model.apply(at, a), step + 1, cost + c);
    }
  };
  walk(start, 0, 0.0);
  return std::min(best, kInfCost);
}

JointSolution joint_optimum(const CoopProblem& problem) {
  if (problem.agents.size() != 2) {
    throw ConfigurationError("joint search handles exactly two agents");
  }
  const TransitionModel& model = problem.model;
  const Bounds b{problem.static_cost.width(), problem.static_cost.height(),
                 model.orientations()};
  const int horizon = problem.horizon;
  if (b.state_count() > 64 || horizon > 8) {
    throw RefusalError("joint search is limited to 64 lattice states and horizon 8");
  }
  const std::size_t n = b.state_count();
  const double idle_penalty = problem.options.idle_penalty;
  const std::array<std::vector<std::uint8_t>, 2> goal = {
      goal_flags(b, problem.agents[0].goals), goal_flags(b, problem.agents[1].goals)};
  const auto cell = [&](std::size_t s) { return s / static_cast<std::size_t>(b.orientations); };
  const double inf = std::numeric_limits<double>::infinity();

  // Per agent: successors of each state at each timestep with their costs.
  struct Move {
    std::size_t to;
    double cost;
  };
  auto moves = [&](int agent, std::size_t s, int t) {
    std::vector<Move> out;
    const Pose from = b.pose(s);
    for (int a = 0; a < model.action_count(); ++a) {
      const double c = edge_cost(model, problem.static_cost, horizon, idle_penalty,
                                 goal[agent], b, from, a, t, nullptr);
      if (c != inf) out.push_back({b.index(model.apply(from, a)), c});
    }
    return out;
  };

  const std::size_t s0 = b.index(problem.agents[0].start);
  const std::size_t s1 = b.index(problem.agents[1].start);
  std::vector<std::vector<double>> cost(horizon + 1, std::vector<double>(n * n, inf));
  std::vector<std::vector<std::size_t>> parent(horizon + 1, std::vector<std::size_t>(n * n));
  std::vector<std::vector<std::array<double, 2>>> split(
      horizon + 1, std::vector<std::array<double, 2>>(n * n, {0.0, 0.0}));
  if (cell(s0) != cell(s1)) cost[0][s0 * n + s1] = 0.0;

  for (int t = 1; t <= horizon; ++t) {
    for (std::size_t p = 0; p < n; ++p) {
      const auto m0 = moves(0, p, t);
      for (std::size_t q = 0; q < n; ++q) {
        const double base = cost[t - 1][p * n + q];
        if (base == inf) continue;
        for (const Move& a : moves(1, q, t)) {
          for (const Move& m : m0) {
            if (cell(m.to) == cell(a.to) || cell(m.to) == cell(q) || cell(p) == cell(a.to)) {
              continue;
            }
            const std::size_t key = m.to * n + a.to;
            const double c = base + m.cost + a.cost;
            if (c < cost[t][key]) {
              cost[t][key] = c;
              parent[t][key] = p * n + q;
              split[t][key] = {split[t - 1][p * n + q][0] + m.cost,
                               split[t - 1][p * n + q][1] + a.cost};
            }
          }
        }
      }
    }
  }

  JointSolution out;
  std::size_t best_key = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!goal[0][p]) continue;
    for (std::size_t q = 0; q < n; ++q) {
      if (!goal[1][q]) continue;
      if (cost[horizon][p * n + q] < out.cost) {
        out.cost = cost[horizon][p * n + q];
        best_key = p * n + q;
        out.feasible = true;
      }
    }
  }
  if (!out.feasible || out.cost >= kInfCost) {
    out.feasible = false;
    out.cost = kInfCost;
    return out;
  }
  out.agent_costs = split[horizon][best_key];
  std::size_t key = best_key;
  for (int t = horizon; t >= 0; --t) {
    out.paths[0].push_back(b.pose(key / n));
    out.paths[1].push_back(b.pose(key % n));
    if (t > 0) key = parent[t][key];
  }
  std::reverse(out.paths[0].begin(), out.paths[0].end());
  std::reverse(out.paths[1].begin(), out.paths[1].end());
  return out;
}

}  // namespace vin::oracle
