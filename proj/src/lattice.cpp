#include "vin/lattice.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace vin {

namespace {

constexpr std::array<std::string_view, 8> kCompass = {"E", "NE", "N", "NW",
                                                      "W", "SW", "S", "SE"};

int wrap(int theta, int orientations) {
  const int r = theta % orientations;
  return r < 0 ? r + orientations : r;
}

// Unit grid step toward `degrees`, y pointing down.
std::pair<int, int> grid_direction(double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  return {static_cast<int>(std::lround(std::cos(rad))),
          -static_cast<int>(std::lround(std::sin(rad)))};
}

}  // namespace

TransitionModel::TransitionModel(int orientations, std::vector<ActionSpec> actions,
                                 std::vector<Filter> bank, double time_cost, bool reversed)
    : orientations_(orientations),
      actions_(std::move(actions)),
      bank_(std::move(bank)),
      time_cost_(time_cost),
      reversed_(reversed) {
  if (orientations_ <= 0) throw ConfigurationError("orientation count must be positive");
  if (actions_.empty()) throw ConfigurationError("transition model needs at least one action");
  if (bank_.size() != static_cast<std::size_t>(orientations_) * actions_.size()) {
    throw ConfigurationError("filter bank size must equal orientations x actions");
  }
  for (int a = 0; a < action_count(); ++a) {
    if (actions_[a].kind == ActionKind::kWait) wait_action_ = a;
  }
}

Pose TransitionModel::apply(const Pose& p, int a) const {
  const Filter& f = filter(p.theta, a);
  return {p.x + f.dx, p.y + f.dy, wrap(p.theta + f.dtheta, orientations_)};
}

TransitionModel build_default_model(int orientations) {
  if (orientations != 4 && (orientations <= 0 || orientations % 8 != 0)) {
    throw ConfigurationError("orientation count must be 4 or a multiple of 8, got " +
                             std::to_string(orientations));
  }
  const int turn = orientations == 4 ? 1 : orientations / 8;
  const double bin_degrees = 360.0 / orientations;

  std::vector<ActionSpec> actions = {{"straight", ActionKind::kStraight},
                                     {"diagonal_left", ActionKind::kDiagonalLeft},
                                     {"diagonal_right", ActionKind::kDiagonalRight},
                                     {"wait", ActionKind::kWait}};
  std::vector<Filter> bank;
  bank.reserve(static_cast<std::size_t>(orientations) * actions.size());
  for (int theta = 0; theta < orientations; ++theta) {
    const double heading = theta * bin_degrees;
    for (const auto& spec : actions) {
      Filter f;
      switch (spec.kind) {
        case ActionKind::kStraight:
          std::tie(f.dx, f.dy) = grid_direction(heading);
          break;
        case ActionKind::kDiagonalLeft:
          std::tie(f.dx, f.dy) = grid_direction(heading + 45.0);
          f.dtheta = turn;
          break;
        case ActionKind::kDiagonalRight:
          std::tie(f.dx, f.dy) = grid_direction(heading - 45.0);
          f.dtheta = -turn;
          break;
        case ActionKind::kWait:
          break;
      }
      f.movement_cost = std::sqrt(static_cast<double>(f.dx * f.dx + f.dy * f.dy));
      bank.push_back(f);
    }
  }
  return TransitionModel(orientations, std::move(actions), std::move(bank), 1.0);
}

TransitionModel reverse_model(const TransitionModel& model) {
  const int orientations = model.orientations();
  const int actions = model.action_count();
  std::vector<Filter> bank(static_cast<std::size_t>(orientations) * actions);
  std::vector<ActionSpec> specs;
  for (int a = 0; a < actions; ++a) specs.push_back(model.action(a));
  for (int theta = 0; theta < orientations; ++theta) {
    for (int a = 0; a < actions; ++a) {
      const Filter& f = model.filter(theta, a);
      const int landing = wrap(theta + f.dtheta, orientations);
      bank[static_cast<std::size_t>(landing) * actions + a] = {-f.dx, -f.dy, -f.dtheta,
                                                               f.movement_cost};
    }
  }
  return TransitionModel(orientations, std::move(specs), std::move(bank), model.time_cost(),
                         !model.is_reversed());
}

std::vector<Successor> feasible_successors(const Pose& p, const TransitionModel& model,
                                           const Bounds& bounds) {
  std::vector<Successor> out;
  for (int a = 0; a < model.action_count(); ++a) {
    const Pose next = model.apply(p, a);
    if (bounds.contains(next)) out.push_back({a, next});
  }
  return out;
}

PredecessorTable build_predecessor_table(const TransitionModel& model, const Bounds& bounds) {
  if (bounds.orientations != model.orientations()) {
    throw ConfigurationError("grid orientation count does not match the transition model");
  }
  PredecessorTable table;
  table.width = bounds.width;
  table.height = bounds.height;
  table.orientations = bounds.orientations;
  table.actions = model.action_count();
  table.source.assign(bounds.state_count() * table.actions, -1);
  for (std::size_t s = 0; s < bounds.state_count(); ++s) {
    const Pose from = bounds.pose(s);
    for (const Successor& succ : feasible_successors(from, model, bounds)) {
      table.source[bounds.index(succ.pose) * table.actions + succ.action] =
          static_cast<std::int32_t>(s);
    }
  }
  return table;
}

std::string heading_label(int theta, int orientations) {
  if (orientations % 8 == 0 && theta % (orientations / 8) == 0) {
    return std::string(kCompass[theta / (orientations / 8)]);
  }
  if (orientations == 4) return std::string(kCompass[theta * 2]);
  return std::to_string(theta);
}

std::optional<int> parse_heading(std::string_view label, int orientations) {
  for (int k = 0; k < 8; ++k) {
    if (label != kCompass[k]) continue;
    // Compass direction k lies at 45k degrees; it must coincide with a bin.
    if ((k * orientations) % 8 != 0) return std::nullopt;
    return k * orientations / 8;
  }
  int theta = -1;
  const auto* end = label.data() + label.size();
  auto [ptr, ec] = std::from_chars(label.data(), end, theta);
  if (ec != std::errc() || ptr != end || theta < 0 || theta >= orientations) {
    return std::nullopt;
  }
  return theta;
}

}  // namespace vin
