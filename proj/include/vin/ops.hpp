#pragma once

#include <cstdint>
#include <vector>

#include "vin/grid.hpp"

namespace vin {

/// For every (state, action) pair, the linear index of the state that the
/// action was applied in, or -1 when that source lies off-grid. This is the
/// index form of a bank of transition filters.
struct PredecessorTable {
  int width = 0;
  int height = 0;
  int orientations = 0;
  int actions = 0;
  std::vector<std::int32_t> source;

  std::size_t state_count() const {
    return static_cast<std::size_t>(width) * height * orientations;
  }
  std::int32_t at(std::size_t state, int action) const {
    return source[state * actions + action];
  }
  bool matches(const Grid3& g) const {
    return g.width() == width && g.height() == height && g.orientations() == orientations;
  }
};

/// Action cost added on top of the propagated cost for one timestep, indexed
/// by [orientation * actions + action] of the state being entered. States
/// flagged in `free_idle` pay nothing at all for `idle_action`.
struct ActionCosts {
  std::vector<double> by_heading;
  int idle_action = -1;
  std::vector<std::uint8_t> free_idle;  // per state; empty means none
};

struct PoolResult {
  Grid3 values;
  Grid4 policy;
};

/// out(s, a) = cost(source(s, a)); `fill` where the source is off-grid.
Grid4 propagate(const Grid3& cost, const PredecessorTable& table, double fill = kInfCost);

/// out(s) = sum_a weights(source(s, a), a). With the table of a reversed model
/// this moves per-action mass back to the predecessor states.
Grid3 gather_actions(const Grid4& weights, const PredecessorTable& table);

/// out(source(s, a)) += g(s, a). Transpose of `propagate` with zero fill.
Grid3 propagate_transpose(const Grid4& g, const PredecessorTable& table);

/// out(source(s, a), a) += g(s). Transpose of `gather_actions`.
Grid4 gather_actions_transpose(const Grid3& g, const PredecessorTable& table);

/// out(s, a) = min(propagated(s, a) + cost(theta, a) + visit(x, y), kInfCost), except
/// free idle entries which keep the propagated value.
Grid4 accumulate(const Grid4& propagated, const ActionCosts& costs, const Grid2& visit);
/// Same with an orientation-resolved visitation cost.
Grid4 accumulate(const Grid4& propagated, const ActionCosts& costs, const Grid3& visit);

/// Softmin over actions with temperature `temperature`. The value is the
/// policy-weighted expectation of q.
PoolResult softmin_pool(const Grid4& q, double temperature);

/// Hard minimum over actions; ties go to the lowest action index.
PoolResult min_pool(const Grid4& q);

double frobenius(const Grid2& a, const Grid2& b);

Grid2 marginalize_orientation(const Grid3& g);

/// out(s, a) = state(s) * policy(s, a).
Grid4 weight_by_policy(const Grid3& state, const Grid4& policy);

/// Divides by the total mass. Throws NumericalCollapseError on zero mass.
Grid3 normalize(const Grid3& g);

}  // namespace vin
