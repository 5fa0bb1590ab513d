#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vin/executor.hpp"
#include "vin/grid.hpp"
#include "vin/lattice.hpp"
#include "vin/scenario.hpp"

namespace vin::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(VIN_SCENARIO_DIR) + "/" + name + ".scn";
}

inline Scenario load_fixture(const std::string& name) { return load_scenario(scenario_path(name)); }

inline Grid2 random_grid2(int w, int h, std::mt19937& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Grid2 g(w, h);
  for (double& v : g.storage()) v = d(rng);
  return g;
}

inline Grid3 random_grid3(int w, int h, int o, std::mt19937& rng, double lo = 0.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Grid3 g(w, h, o);
  for (double& v : g.storage()) v = d(rng);
  return g;
}

inline Grid4 random_grid4(int w, int h, int o, int a, std::mt19937& rng, double lo = 0.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Grid4 g(w, h, o, a);
  for (double& v : g.storage()) v = d(rng);
  return g;
}

inline Grid3 random_distribution(int w, int h, int o, std::mt19937& rng) {
  Grid3 g = random_grid3(w, h, o, rng, 0.01, 1.0);
  double total = 0.0;
  for (double v : g.data()) total += v;
  for (double& v : g.storage()) v /= total;
  return g;
}

/// Obstacles at kInfCost with the given density; cells listed in `keep` stay free.
inline Grid2 random_map(int w, int h, double density, std::mt19937& rng,
                        const std::vector<std::pair<int, int>>& keep = {}) {
  std::bernoulli_distribution blocked(density);
  Grid2 g(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (blocked(rng)) g(x, y) = kInfCost;
    }
  }
  for (auto [x, y] : keep) g(x, y) = 0.0;
  return g;
}

inline std::vector<Pose> any_heading(int x, int y, int orientations) {
  std::vector<Pose> out;
  for (int t = 0; t < orientations; ++t) out.push_back({x, y, t});
  return out;
}

/// Central difference of f along every coordinate of x.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h = 1e-4) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

inline bool close_relative(double a, double b, double rel, double abs_floor) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

/// Free cells of map columns that hold exactly one free cell.
inline std::vector<std::pair<int, int>> narrowing_cells(const Scenario& sc) {
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < sc.width(); ++x) {
    int free = 0, row = -1;
    for (int y = 0; y < sc.height(); ++y) {
      if (!sc.blocked(x, y)) {
        ++free;
        row = y;
      }
    }
    if (free == 1) out.push_back({x, row});
  }
  return out;
}

struct Transit {
  int first = -1;  // first timestep inside the narrowing, -1 if never
  int last = -1;
};

inline Transit transit(const Trajectory& tr, const std::vector<std::pair<int, int>>& cells) {
  Transit out;
  for (int t = 0; t <= tr.horizon(); ++t) {
    const Pose& p = tr.decoded[t];
    for (auto [x, y] : cells) {
      if (p.x == x && p.y == y) {
        if (out.first < 0) out.first = t;
        out.last = t;
      }
    }
  }
  return out;
}

/// Chebyshev distance from a pose to the nearest listed cell.
inline int distance_to(const Pose& p, const std::vector<std::pair<int, int>>& cells) {
  int best = 1 << 20;
  for (auto [x, y] : cells) best = std::min(best, std::max(std::abs(p.x - x), std::abs(p.y - y)));
  return best;
}

/// The agent that starts nearer the narrowing leaves it before the other one
/// enters.
inline bool nearer_agent_passes_first(const Scenario& sc, const std::vector<Trajectory>& trs) {
  const auto cells = narrowing_cells(sc);
  const int d0 = distance_to(sc.agents[0].start, cells);
  const int d1 = distance_to(sc.agents[1].start, cells);
  if (d0 == d1) return false;
  const std::size_t near = d0 < d1 ? 0 : 1;
  const Transit a = transit(trs[near], cells);
  const Transit b = transit(trs[1 - near], cells);
  return a.first >= 0 && b.first >= 0 && a.last < b.first;
}

}  // namespace vin::testing
