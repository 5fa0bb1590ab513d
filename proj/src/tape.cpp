#include "vin/tape.hpp"

#include <algorithm>
#include <cmath>

namespace vin {

namespace {

std::size_t value_size(const Tape::Value& v) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
          return 1;
        } else {
          return x.size();
        }
      },
      v);
}

}  // namespace

std::span<const double> Tape::data_of(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::span<const double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
          return std::span<const double>(&x, 1);
        } else {
          return x.data();
        }
      },
      v);
}

Tape::Var Tape::record(Op op, Value value, std::vector<std::size_t> inputs,
                       Backward backward) {
  Node node{op, std::move(value), std::move(inputs), false, std::move(backward)};
  if (op == Op::kVariable) {
    node.requires_grad = true;
  } else {
    for (std::size_t in : node.inputs) {
      if (nodes_[in].requires_grad) node.requires_grad = true;
    }
  }
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

std::span<double> Tape::grad_of(std::size_t id) {
  auto& g = grads_[id];
  if (g.empty()) g.assign(value_size(nodes_[id].value), 0.0);
  return g;
}

double Tape::scalar(Var v) const { return std::get<double>(nodes_[v.id].value); }
const Grid2& Tape::grid2(Var v) const { return std::get<Grid2>(nodes_[v.id].value); }
const Grid3& Tape::grid3(Var v) const { return std::get<Grid3>(nodes_[v.id].value); }
const Grid4& Tape::grid4(Var v) const { return std::get<Grid4>(nodes_[v.id].value); }

Tape::Var Tape::constant(Value value) {
  return record(Op::kConstant, std::move(value), {}, {});
}

Tape::Var Tape::variable(Value value) {
  return record(Op::kVariable, std::move(value), {}, {});
}

Tape::Var Tape::propagate(Var cost, TablePtr table, double fill) {
  Grid4 out = vin::propagate(grid3(cost), *table, fill);
  return record(Op::kPropagate, std::move(out), {cost.id},
                [table](Tape& tape, std::size_t self, std::span<const double> g) {
                  const std::size_t in = tape.nodes_[self].inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  auto gin = tape.grad_of(in);
                  const std::size_t states = table->state_count();
                  const int actions = table->actions;
                  for (std::size_t s = 0; s < states; ++s) {
                    for (int a = 0; a < actions; ++a) {
                      const auto src = table->at(s, a);
                      if (src >= 0) gin[static_cast<std::size_t>(src)] += g[s * actions + a];
                    }
                  }
                });
}

Tape::Var Tape::gather_actions(Var weights, TablePtr table) {
  Grid3 out = vin::gather_actions(grid4(weights), *table);
  return record(Op::kGatherActions, std::move(out), {weights.id},
                [table](Tape& tape, std::size_t self, std::span<const double> g) {
                  const std::size_t in = tape.nodes_[self].inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  auto gin = tape.grad_of(in);
                  const std::size_t states = table->state_count();
                  const int actions = table->actions;
                  for (std::size_t s = 0; s < states; ++s) {
                    for (int a = 0; a < actions; ++a) {
                      const auto src = table->at(s, a);
                      if (src >= 0) gin[static_cast<std::size_t>(src) * actions + a] += g[s];
                    }
                  }
                });
}

Tape::Var Tape::accumulate(Var propagated, ActionCosts costs, Var visit) {
  const Grid4& p = grid4(propagated);
  Grid4 out = std::holds_alternative<Grid2>(value(visit))
                  ? vin::accumulate(p, costs, grid2(visit))
                  : vin::accumulate(p, costs, grid3(visit));
  const bool planar = std::holds_alternative<Grid2>(value(visit));
  return record(
      Op::kAccumulate, std::move(out), {propagated.id, visit.id},
      [costs = std::move(costs), planar](Tape& tape, std::size_t self,
                                         std::span<const double> g) {
        const Node& node = tape.nodes_[self];
        const Grid4& q = std::get<Grid4>(node.value);
        const std::size_t states = q.state_count();
        const int actions = q.actions();
        const std::size_t per_cell = planar ? static_cast<std::size_t>(q.orientations()) : 1;
        const bool want_p = tape.nodes_[node.inputs[0]].requires_grad;
        const bool want_v = tape.nodes_[node.inputs[1]].requires_grad;
        std::span<double> gp, gv;
        if (want_p) gp = tape.grad_of(node.inputs[0]);
        if (want_v) gv = tape.grad_of(node.inputs[1]);
        for (std::size_t s = 0; s < states; ++s) {
          const bool free = !costs.free_idle.empty() && costs.free_idle[s] != 0;
          for (int a = 0; a < actions; ++a) {
            const std::size_t i = s * actions + a;
            // Saturated entries carry no gradient.
            if (q[i] >= kInfCost) continue;
            if (want_p) gp[i] += g[i];
            if (want_v && !(free && a == costs.idle_action)) gv[s / per_cell] += g[i];
          }
        }
      });
}

Tape::Var Tape::add(Var a, Var b) {
  const auto da = data_of(value(a));
  const auto db = data_of(value(b));
  if (da.size() != db.size() || value(a).index() != value(b).index()) {
    throw ConfigurationError("add of differently shaped values");
  }
  Value out = value(a);
  std::visit(
      [&](auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
          x += db[0];
        } else {
          for (std::size_t i = 0; i < x.size(); ++i) x[i] += db[i];
        }
      },
      out);
  return record(Op::kAdd, std::move(out), {a.id, b.id},
                [](Tape& tape, std::size_t self, std::span<const double> g) {
                  for (std::size_t in : tape.nodes_[self].inputs) {
                    if (!tape.nodes_[in].requires_grad) continue;
                    auto gin = tape.grad_of(in);
                    for (std::size_t i = 0; i < g.size(); ++i) gin[i] += g[i];
                  }
                });
}

Tape::Pooled Tape::softmin_pool(Var q, double temperature) {
  PoolResult pooled = vin::softmin_pool(grid4(q), temperature);
  // d policy(s,a) / d q(s,b) = -policy(s,a) (delta_ab - policy(s,b)) / tau
  Var policy = record(
      Op::kSoftminPolicy, std::move(pooled.policy), {q.id},
      [temperature](Tape& tape, std::size_t self, std::span<const double> g) {
        const Node& node = tape.nodes_[self];
        const std::size_t in = node.inputs[0];
        if (!tape.nodes_[in].requires_grad) return;
        const Grid4& pi = std::get<Grid4>(node.value);
        auto gq = tape.grad_of(in);
        const int actions = pi.actions();
        for (std::size_t s = 0; s < pi.state_count(); ++s) {
          double mean = 0.0;
          for (int a = 0; a < actions; ++a) mean += g[s * actions + a] * pi.at(s, a);
          for (int a = 0; a < actions; ++a) {
            const std::size_t i = s * actions + a;
            gq[i] -= pi[i] * (g[i] - mean) / temperature;
          }
        }
      });
  // value(s) = sum_a policy(s,a) q(s,a)
  Var values = record(Op::kExpectedValue, std::move(pooled.values), {policy.id, q.id},
                      [](Tape& tape, std::size_t self, std::span<const double> g) {
                        const Node& node = tape.nodes_[self];
                        const std::size_t pi_id = node.inputs[0];
                        const std::size_t q_id = node.inputs[1];
                        const Grid4& pi = std::get<Grid4>(tape.nodes_[pi_id].value);
                        const Grid4& qq = std::get<Grid4>(tape.nodes_[q_id].value);
                        const int actions = pi.actions();
                        if (tape.nodes_[pi_id].requires_grad) {
                          auto gpi = tape.grad_of(pi_id);
                          for (std::size_t i = 0; i < pi.size(); ++i) {
                            gpi[i] += g[i / actions] * qq[i];
                          }
                        }
                        if (tape.nodes_[q_id].requires_grad) {
                          auto gq = tape.grad_of(q_id);
                          for (std::size_t i = 0; i < pi.size(); ++i) {
                            gq[i] += g[i / actions] * pi[i];
                          }
                        }
                      });
  return {values, policy};
}

Tape::Pooled Tape::min_pool(Var q) {
  PoolResult pooled = vin::min_pool(grid4(q));
  Var policy = record(Op::kMinPool, std::move(pooled.policy), {q.id}, {});
  Var values = record(Op::kMinPool, std::move(pooled.values), {q.id}, {});
  return {values, policy};
}

Tape::Var Tape::weight_by_policy(Var state, Var policy) {
  Grid4 out = vin::weight_by_policy(grid3(state), grid4(policy));
  return record(Op::kWeightByPolicy, std::move(out), {state.id, policy.id},
                [](Tape& tape, std::size_t self, std::span<const double> g) {
                  const Node& node = tape.nodes_[self];
                  const std::size_t st_id = node.inputs[0];
                  const std::size_t pi_id = node.inputs[1];
                  const Grid3& st = std::get<Grid3>(tape.nodes_[st_id].value);
                  const Grid4& pi = std::get<Grid4>(tape.nodes_[pi_id].value);
                  const int actions = pi.actions();
                  if (tape.nodes_[st_id].requires_grad) {
                    auto gs = tape.grad_of(st_id);
                    for (std::size_t i = 0; i < pi.size(); ++i) gs[i / actions] += g[i] * pi[i];
                  }
                  if (tape.nodes_[pi_id].requires_grad) {
                    auto gpi = tape.grad_of(pi_id);
                    for (std::size_t i = 0; i < pi.size(); ++i) gpi[i] += g[i] * st[i / actions];
                  }
                });
}

Tape::Var Tape::normalize(Var g3) {
  const Grid3& in = grid3(g3);
  double total = 0.0;
  for (double v : in.data()) total += v;
  Grid3 out = vin::normalize(in);
  // y = x / S  =>  dx_i = (dy_i - sum_j dy_j y_j) / S
  return record(Op::kNormalize, std::move(out), {g3.id},
                [total](Tape& tape, std::size_t self, std::span<const double> g) {
                  const Node& node = tape.nodes_[self];
                  const std::size_t in = node.inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  const Grid3& y = std::get<Grid3>(node.value);
                  double mean = 0.0;
                  for (std::size_t i = 0; i < y.size(); ++i) mean += g[i] * y[i];
                  auto gin = tape.grad_of(in);
                  for (std::size_t i = 0; i < y.size(); ++i) gin[i] += (g[i] - mean) / total;
                });
}

Tape::Var Tape::marginalize_orientation(Var g3) {
  const Grid3& in = grid3(g3);
  const auto orientations = static_cast<std::size_t>(in.orientations());
  return record(Op::kMarginalize, vin::marginalize_orientation(in), {g3.id},
                [orientations](Tape& tape, std::size_t self, std::span<const double> g) {
                  const std::size_t in = tape.nodes_[self].inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  auto gin = tape.grad_of(in);
                  for (std::size_t i = 0; i < gin.size(); ++i) gin[i] += g[i / orientations];
                });
}

Tape::Var Tape::frobenius(Var a, Var b) {
  if (!std::holds_alternative<Grid2>(value(a)) || !std::holds_alternative<Grid2>(value(b))) {
    throw ConfigurationError("frobenius expects planar grids");
  }
  if (!grid2(a).same_shape(grid2(b))) {
    throw ConfigurationError("frobenius product of differently shaped grids");
  }
  return dot(a, b);
}

Tape::Var Tape::dot(Var a, Var b) {
  const auto da = data_of(value(a));
  const auto db = data_of(value(b));
  if (da.size() != db.size()) throw ConfigurationError("dot of differently sized values");
  double total = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) total += da[i] * db[i];
  return record(Op::kDot, total, {a.id, b.id},
                [](Tape& tape, std::size_t self, std::span<const double> g) {
                  const Node& node = tape.nodes_[self];
                  const std::size_t ia = node.inputs[0];
                  const std::size_t ib = node.inputs[1];
                  const auto va = data_of(tape.nodes_[ia].value);
                  const auto vb = data_of(tape.nodes_[ib].value);
                  if (tape.nodes_[ia].requires_grad) {
                    auto ga = tape.grad_of(ia);
                    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0] * vb[i];
                  }
                  if (tape.nodes_[ib].requires_grad) {
                    auto gb = tape.grad_of(ib);
                    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[0] * va[i];
                  }
                });
}

Tape::Var Tape::dot(Var a, std::vector<double> weights) {
  const auto da = data_of(value(a));
  if (da.size() != weights.size()) throw ConfigurationError("dot of differently sized values");
  double total = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) total += da[i] * weights[i];
  return record(Op::kConstantDot, total, {a.id},
                [w = std::move(weights)](Tape& tape, std::size_t self,
                                         std::span<const double> g) {
                  const std::size_t in = tape.nodes_[self].inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  auto gin = tape.grad_of(in);
                  for (std::size_t i = 0; i < gin.size(); ++i) gin[i] += g[0] * w[i];
                });
}

Tape::Var Tape::sum(std::span<const Var> terms) {
  double total = 0.0;
  std::vector<std::size_t> inputs;
  inputs.reserve(terms.size());
  for (Var t : terms) {
    total += scalar(t);
    inputs.push_back(t.id);
  }
  return record(Op::kSum, total, std::move(inputs),
                [](Tape& tape, std::size_t self, std::span<const double> g) {
                  for (std::size_t in : tape.nodes_[self].inputs) {
                    if (tape.nodes_[in].requires_grad) tape.grad_of(in)[0] += g[0];
                  }
                });
}

Tape::Var Tape::scale(Var x, double factor) {
  Value out = value(x);
  std::visit(
      [&](auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
          v *= factor;
        } else {
          for (double& e : v.data()) e *= factor;
        }
      },
      out);
  return record(Op::kScale, std::move(out), {x.id},
                [factor](Tape& tape, std::size_t self, std::span<const double> g) {
                  const std::size_t in = tape.nodes_[self].inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  auto gin = tape.grad_of(in);
                  for (std::size_t i = 0; i < gin.size(); ++i) gin[i] += factor * g[i];
                });
}

Tape::Var Tape::goal_mixture(Var values, std::vector<std::size_t> states, double temperature) {
  if (!(temperature > 0.0)) throw ConfigurationError("softmin temperature must be positive");
  if (states.empty()) throw ConfigurationError("goal mixture over an empty set");
  const Grid3& v = grid3(values);
  Grid3 out(v.width(), v.height(), v.orientations(), 0.0);
  double lowest = v[states[0]];
  for (std::size_t s : states) lowest = std::min(lowest, v[s]);
  double norm = 0.0;
  for (std::size_t s : states) norm += std::exp(-(v[s] - lowest) / temperature);
  for (std::size_t s : states) out[s] += std::exp(-(v[s] - lowest) / temperature) / norm;
  return record(Op::kGoalMixture, std::move(out), {values.id},
                [states = std::move(states), temperature](Tape& tape, std::size_t self,
                                                          std::span<const double> g) {
                  const Node& node = tape.nodes_[self];
                  const std::size_t in = node.inputs[0];
                  if (!tape.nodes_[in].requires_grad) return;
                  const Grid3& y = std::get<Grid3>(node.value);
                  double mean = 0.0;
                  for (std::size_t s : states) mean += g[s] * y[s];
                  auto gin = tape.grad_of(in);
                  for (std::size_t s : states) gin[s] -= y[s] * (g[s] - mean) / temperature;
                });
}

Tape::Gradients Tape::backward(Var loss, double seed) {
  if (!std::holds_alternative<double>(value(loss))) {
    throw ConfigurationError("backward requires a scalar loss");
  }
  grads_.assign(nodes_.size(), {});
  visit_order_.clear();
  if (nodes_[loss.id].requires_grad) grad_of(loss.id)[0] = seed;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || grads_[i].empty()) continue;
    if (node.op == Op::kMinPool) {
      throw UnsupportedOperationError(
          "hard min pooling lies on a differentiable path; use softmin_pool");
    }
    visit_order_.push_back(node.op);
    if (node.backward) node.backward(*this, i, grads_[i]);
  }
  Gradients out;
  out.sizes_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out.sizes_[i] = value_size(nodes_[i].value);
  }
  out.grads_ = std::move(grads_);
  grads_.clear();
  return out;
}

std::vector<double> Tape::Gradients::of(Var v) const {
  if (v.id >= grads_.size() || grads_[v.id].empty()) {
    return std::vector<double>(v.id < sizes_.size() ? sizes_[v.id] : 0, 0.0);
  }
  return grads_[v.id];
}

}  // namespace vin
