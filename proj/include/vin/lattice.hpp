#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vin/grid.hpp"
#include "vin/ops.hpp"

namespace vin {

/// Lattice state: cell plus orientation bin. Bin k points at 360k/N degrees,
/// counter-clockwise from east, with y growing downward (row order).
struct Pose {
  int x = 0;
  int y = 0;
  int theta = 0;

  friend auto operator<=>(const Pose&, const Pose&) = default;
};

struct Bounds {
  int width = 0;
  int height = 0;
  int orientations = 0;

  bool contains(const Pose& p) const {
    return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height && p.theta >= 0 &&
           p.theta < orientations;
  }
  std::size_t state_count() const {
    return static_cast<std::size_t>(width) * height * orientations;
  }
  /// Same linear order as Grid3.
  std::size_t index(const Pose& p) const {
    return (static_cast<std::size_t>(p.y) * width + p.x) * orientations + p.theta;
  }
  Pose pose(std::size_t index) const {
    const int theta = static_cast<int>(index % orientations);
    const std::size_t cell = index / orientations;
    return {static_cast<int>(cell % width), static_cast<int>(cell / width), theta};
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

enum class ActionKind { kStraight, kDiagonalLeft, kDiagonalRight, kWait };

struct ActionSpec {
  std::string name;
  ActionKind kind;
  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

/// One transition filter: where an action moves a state, and what it costs.
struct Filter {
  int dx = 0;
  int dy = 0;
  int dtheta = 0;
  double movement_cost = 0.0;
  friend bool operator==(const Filter&, const Filter&) = default;
};

/// Orientation-indexed bank of transition filters. Immutable.
///
/// A forward model maps a source pose through filter(theta, a) to its
/// successor. The reversed model, indexed by the successor orientation,
/// undoes each such move and is used to trace trajectories backward.
class TransitionModel {
 public:
  TransitionModel(int orientations, std::vector<ActionSpec> actions,
                  std::vector<Filter> bank, double time_cost, bool reversed = false);

  int orientations() const { return orientations_; }
  int action_count() const { return static_cast<int>(actions_.size()); }
  int filter_count() const { return static_cast<int>(bank_.size()); }
  const ActionSpec& action(int a) const { return actions_[a]; }
  const Filter& filter(int theta, int a) const {
    return bank_[static_cast<std::size_t>(theta) * actions_.size() + a];
  }
  /// Index of the idle action, or -1.
  int wait_action() const { return wait_action_; }
  double time_cost() const { return time_cost_; }
  bool is_reversed() const { return reversed_; }

  /// Result of applying action `a` at `p`, ignoring map bounds.
  Pose apply(const Pose& p, int a) const;

  friend bool operator==(const TransitionModel&, const TransitionModel&) = default;

 private:
  int orientations_;
  std::vector<ActionSpec> actions_;
  std::vector<Filter> bank_;
  double time_cost_;
  bool reversed_;
  int wait_action_ = -1;
};

/// Straight, diagonal-left, diagonal-right and wait for every orientation.
/// Diagonal actions turn by 45 degrees (one bin of N/8; a single 90 degree bin
/// for the reduced four-orientation lattice) and move toward the heading
/// rotated by 45 degrees. Movement cost is the length of the grid
/// displacement; every action carries a time cost of 1.
TransitionModel build_default_model(int orientations = 8);

TransitionModel reverse_model(const TransitionModel& model);

struct Successor {
  int action;
  Pose pose;
  friend bool operator==(const Successor&, const Successor&) = default;
};

/// In-bounds successors of `p`, in action order.
std::vector<Successor> feasible_successors(const Pose& p, const TransitionModel& model,
                                           const Bounds& bounds);

/// Index form of the model's filter bank on a bounded grid.
PredecessorTable build_predecessor_table(const TransitionModel& model, const Bounds& bounds);

/// Compass label for a bin ("E", "NE", ...); falls back to the bin number.
std::string heading_label(int theta, int orientations);
/// Accepts compass labels that land exactly on a bin, or a bin number.
std::optional<int> parse_heading(std::string_view label, int orientations);

}  // namespace vin
