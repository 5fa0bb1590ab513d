#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vin/coop.hpp"
#include "vin/grid.hpp"
#include "vin/lattice.hpp"
#include "vin/planner.hpp"

namespace vin {

/// A goal cell with a fixed heading, or any heading when `theta` is empty.
struct GoalSpec {
  int x = 0;
  int y = 0;
  std::optional<int> theta;
  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

struct AgentEntry {
  Pose start;
  std::vector<GoalSpec> goals;
  friend bool operator==(const AgentEntry&, const AgentEntry&) = default;
};

struct SolverBlock {
  double tau = 0.5;
  double eta = 0.5;
  double lambda_coll = 100.0;
  double idle_penalty = kDefaultIdlePenalty;
  int max_iters = 200;
  PoolMode mode = PoolMode::kSoft;
  friend bool operator==(const SolverBlock&, const SolverBlock&) = default;
};

/// Planning task as read from a scenario file.
///
/// File layout: `key: value` header lines, one `agent:` line per agent, then
/// a `map:` line followed by the map rows ('.' free, '#' obstacle). Lines
/// starting with '#' before the map are comments.
///
///     name: narrowing
///     horizon: 20
///     agent: start=0,2,E goals=14,2,any
///     map:
///     ...............
struct Scenario {
  std::string name;
  int orientations = 8;
  int horizon = 0;
  SolverBlock solver;
  std::vector<AgentEntry> agents;
  std::vector<std::string> map;

  int width() const { return map.empty() ? 0 : static_cast<int>(map.front().size()); }
  int height() const { return static_cast<int>(map.size()); }
  Bounds bounds() const { return {width(), height(), orientations}; }
  bool blocked(int x, int y) const { return map[y][x] == '#'; }

  /// kInfCost on obstacles, zero elsewhere.
  Grid2 static_cost() const;
  std::vector<Pose> goal_poses(std::size_t agent) const;
  CoopProblem problem() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Diagnostic {
  std::string code;
  int line = 0;
  std::string message;
};

/// Every problem found while reading a scenario, in line order.
class ScenarioParseError : public ScenarioError {
 public:
  explicit ScenarioParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  bool has(std::string_view code) const;

 private:
  std::vector<Diagnostic> diagnostics_;
};

namespace diag {
inline constexpr std::string_view kRaggedMap = "map.ragged";
inline constexpr std::string_view kBadCell = "map.cell";
inline constexpr std::string_view kMissingMap = "map.missing";
inline constexpr std::string_view kStartBlocked = "agent.start_blocked";
inline constexpr std::string_view kGoalBlocked = "agent.goal_blocked";
inline constexpr std::string_view kOutOfMap = "agent.out_of_map";
inline constexpr std::string_view kUnknownHeading = "agent.heading";
inline constexpr std::string_view kAgentSyntax = "agent.syntax";
inline constexpr std::string_view kNoAgents = "agent.none";
inline constexpr std::string_view kMissingHorizon = "header.horizon_missing";
inline constexpr std::string_view kBadValue = "header.value";
inline constexpr std::string_view kUnknownKey = "header.key";
}  // namespace diag

Scenario parse_scenario(std::string_view text);
std::string serialize_scenario(const Scenario& scenario);
Scenario load_scenario(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace vin
