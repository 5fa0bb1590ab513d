#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "vin/grid.hpp"
#include "vin/ops.hpp"

namespace vin {

/// Records grid operations in execution order and replays them backward to
/// obtain gradients of a scalar with respect to the marked variables.
///
/// Only the primitives of the planning pipeline are supported. Hard min
/// pooling may be recorded for bookkeeping but is not differentiable: a
/// backward pass that reaches it throws UnsupportedOperationError.
///
/// A tape is single-writer. Tables passed to propagation ops are shared so
/// that they outlive the recording.
class Tape {
 public:
  struct Var {
    std::size_t id = 0;
  };

  enum class Op {
    kConstant,
    kVariable,
    kPropagate,
    kGatherActions,
    kAccumulate,
    kAdd,
    kSoftminPolicy,
    kExpectedValue,
    kMinPool,
    kWeightByPolicy,
    kNormalize,
    kMarginalize,
    kDot,
    kConstantDot,
    kSum,
    kScale,
    kGoalMixture,
  };

  struct Pooled {
    Var values;
    Var policy;
  };

  using Value = std::variant<double, Grid2, Grid3, Grid4>;
  using TablePtr = std::shared_ptr<const PredecessorTable>;

  Var constant(Value value);
  Var variable(Value value);

  Var propagate(Var cost, TablePtr table, double fill = kInfCost);
  Var gather_actions(Var weights, TablePtr table);
  Var accumulate(Var propagated, ActionCosts costs, Var visit);
  Var add(Var a, Var b);
  Pooled softmin_pool(Var q, double temperature);
  Pooled min_pool(Var q);
  Var weight_by_policy(Var state, Var policy);
  Var normalize(Var g);
  Var marginalize_orientation(Var g);
  /// Sum of elementwise products of two planar grids.
  Var frobenius(Var a, Var b);
  /// Sum of elementwise products of two equally sized values of any rank.
  Var dot(Var a, Var b);
  Var dot(Var a, std::vector<double> weights);
  Var sum(std::span<const Var> terms);
  Var scale(Var x, double factor);
  /// Softmin distribution over the listed states of a value grid; zero mass
  /// everywhere else.
  Var goal_mixture(Var values, std::vector<std::size_t> states, double temperature);

  const Value& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const;
  const Grid2& grid2(Var v) const;
  const Grid3& grid3(Var v) const;
  const Grid4& grid4(Var v) const;
  Op op(Var v) const { return nodes_[v.id].op; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  class Gradients {
   public:
    /// Gradient of the loss with respect to `v`; zeros if the loss does not
    /// depend on it.
    std::vector<double> of(Var v) const;

   private:
    friend class Tape;
    std::vector<std::vector<double>> grads_;
    std::vector<std::size_t> sizes_;
  };

  /// Reverse sweep from a scalar node. Visits recorded operations in exact
  /// reverse order of execution.
  Gradients backward(Var loss, double seed = 1.0);

  /// Ops visited by the most recent backward pass, in visiting order.
  const std::vector<Op>& last_backward_order() const { return visit_order_; }

 private:
  using Backward = std::function<void(Tape&, std::size_t self, std::span<const double> grad)>;

  struct Node {
    Op op;
    Value value;
    std::vector<std::size_t> inputs;
    bool requires_grad = false;
    Backward backward;
  };

  Var record(Op op, Value value, std::vector<std::size_t> inputs, Backward backward);
  std::span<double> grad_of(std::size_t id);
  static std::span<const double> data_of(const Value& v);

  std::vector<Node> nodes_;
  std::vector<std::vector<double>> grads_;
  std::vector<Op> visit_order_;
};

}  // namespace vin
