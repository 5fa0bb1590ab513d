#include "vin/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vin {

namespace {

void check_table(const Grid3& g, const PredecessorTable& table) {
  if (!table.matches(g)) {
    throw ConfigurationError("grid dimensions do not match the transition table");
  }
  if (table.actions < 1) {
    throw ConfigurationError("transition table has no actions");
  }
}

void check_table(const Grid4& g, const PredecessorTable& table) {
  if (g.width() != table.width || g.height() != table.height ||
      g.orientations() != table.orientations || g.actions() != table.actions) {
    throw ConfigurationError("action grid dimensions do not match the transition table");
  }
}

template <typename VisitAt>
Grid4 accumulate_impl(const Grid4& propagated, const ActionCosts& costs, VisitAt visit_at) {
  const int actions = propagated.actions();
  const int orientations = propagated.orientations();
  if (costs.by_heading.size() != static_cast<std::size_t>(orientations) * actions) {
    throw ConfigurationError("action cost schedule does not match orientations x actions");
  }
  const std::size_t states = propagated.state_count();
  if (!costs.free_idle.empty() && costs.free_idle.size() != states) {
    throw ConfigurationError("free-idle mask does not match state count");
  }
  Grid4 out(propagated.width(), propagated.height(), propagated.orientations(), actions);
  for (std::size_t s = 0; s < states; ++s) {
    const double visit = visit_at(s);
    const bool free = !costs.free_idle.empty() && costs.free_idle[s] != 0;
    const double* cost = &costs.by_heading[(s % orientations) * actions];
    for (int a = 0; a < actions; ++a) {
      const double p = propagated.at(s, a);
      const double q = (free && a == costs.idle_action) ? p : p + cost[a] + visit;
      out.at(s, a) = std::min(q, kInfCost);
    }
  }
  return out;
}

}  // namespace

Grid4 propagate(const Grid3& cost, const PredecessorTable& table, double fill) {
  check_table(cost, table);
  Grid4 out(cost.width(), cost.height(), cost.orientations(), table.actions);
  const std::size_t states = table.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    for (int a = 0; a < table.actions; ++a) {
      const std::int32_t src = table.at(s, a);
      out.at(s, a) = src < 0 ? fill : cost[static_cast<std::size_t>(src)];
    }
  }
  return out;
}

Grid3 gather_actions(const Grid4& weights, const PredecessorTable& table) {
  check_table(weights, table);
  Grid3 out(weights.width(), weights.height(), weights.orientations());
  const std::size_t states = table.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    double total = 0.0;
    for (int a = 0; a < table.actions; ++a) {
      const std::int32_t src = table.at(s, a);
      if (src >= 0) total += weights.at(static_cast<std::size_t>(src), a);
    }
    out[s] = total;
  }
  return out;
}

Grid3 propagate_transpose(const Grid4& g, const PredecessorTable& table) {
  check_table(g, table);
  Grid3 out(g.width(), g.height(), g.orientations());
  const std::size_t states = table.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    for (int a = 0; a < table.actions; ++a) {
      const std::int32_t src = table.at(s, a);
      if (src >= 0) out[static_cast<std::size_t>(src)] += g.at(s, a);
    }
  }
  return out;
}

Grid4 gather_actions_transpose(const Grid3& g, const PredecessorTable& table) {
  check_table(g, table);
  Grid4 out(g.width(), g.height(), g.orientations(), table.actions);
  const std::size_t states = table.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    for (int a = 0; a < table.actions; ++a) {
      const std::int32_t src = table.at(s, a);
      if (src >= 0) out.at(static_cast<std::size_t>(src), a) += g[s];
    }
  }
  return out;
}

Grid4 accumulate(const Grid4& propagated, const ActionCosts& costs, const Grid2& visit) {
  if (visit.width() != propagated.width() || visit.height() != propagated.height()) {
    throw ConfigurationError("visitation cost grid does not match the planning grid");
  }
  const int orientations = propagated.orientations();
  return accumulate_impl(propagated, costs, [&](std::size_t s) {
    return visit[s / static_cast<std::size_t>(orientations)];
  });
}

Grid4 accumulate(const Grid4& propagated, const ActionCosts& costs, const Grid3& visit) {
  if (!propagated.matches(visit)) {
    throw ConfigurationError("visitation cost grid does not match the planning grid");
  }
  return accumulate_impl(propagated, costs, [&](std::size_t s) { return visit[s]; });
}

PoolResult softmin_pool(const Grid4& q, double temperature) {
  if (!(temperature > 0.0)) {
    throw ConfigurationError("softmin temperature must be positive");
  }
  const int actions = q.actions();
  PoolResult out{Grid3(q.width(), q.height(), q.orientations()),
                 Grid4(q.width(), q.height(), q.orientations(), actions)};
  const std::size_t states = q.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    double lowest = std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) lowest = std::min(lowest, q.at(s, a));
    double norm = 0.0;
    for (int a = 0; a < actions; ++a) {
      const double w = std::exp(-(q.at(s, a) - lowest) / temperature);
      out.policy.at(s, a) = w;
      norm += w;
    }
    double value = 0.0;
    for (int a = 0; a < actions; ++a) {
      const double p = out.policy.at(s, a) / norm;
      out.policy.at(s, a) = p;
      value += p * q.at(s, a);
    }
    out.values[s] = value;
  }
  return out;
}

PoolResult min_pool(const Grid4& q) {
  const int actions = q.actions();
  PoolResult out{Grid3(q.width(), q.height(), q.orientations()),
                 Grid4(q.width(), q.height(), q.orientations(), actions, 0.0)};
  const std::size_t states = q.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    int best = 0;
    for (int a = 1; a < actions; ++a) {
      if (q.at(s, a) < q.at(s, best)) best = a;
    }
    out.values[s] = q.at(s, best);
    out.policy.at(s, best) = 1.0;
  }
  return out;
}

double frobenius(const Grid2& a, const Grid2& b) {
  if (!a.same_shape(b)) {
    throw ConfigurationError("frobenius product of differently shaped grids");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

Grid2 marginalize_orientation(const Grid3& g) {
  Grid2 out(g.width(), g.height());
  const auto orientations = static_cast<std::size_t>(g.orientations());
  for (std::size_t i = 0; i < g.size(); ++i) out[i / orientations] += g[i];
  return out;
}

Grid4 weight_by_policy(const Grid3& state, const Grid4& policy) {
  if (!policy.matches(state)) {
    throw ConfigurationError("state grid does not match policy grid");
  }
  Grid4 out(policy.width(), policy.height(), policy.orientations(), policy.actions());
  for (std::size_t s = 0; s < policy.state_count(); ++s) {
    for (int a = 0; a < policy.actions(); ++a) {
      out.at(s, a) = state[s] * policy.at(s, a);
    }
  }
  return out;
}

Grid3 normalize(const Grid3& g) {
  double total = 0.0;
  for (double v : g.data()) total += v;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalCollapseError("state distribution lost all mass");
  }
  Grid3 out = g;
  for (double& v : out.data()) v /= total;
  return out;
}

}  // namespace vin
