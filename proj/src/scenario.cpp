#include "vin/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto end = s.find(sep, begin);
    out.push_back(trim(s.substr(begin, end - begin)));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

struct PendingAgent {
  int line;
  std::string_view text;
};

class Reader {
 public:
  std::vector<Diagnostic> diagnostics;

  void error(std::string_view code, int line, std::string message) {
    diagnostics.push_back({std::string(code), line, std::move(message)});
  }

  // Parses "x,y,heading"; heading may be "any" when allowed.
  bool pose_fields(std::string_view text, int line, int orientations, bool allow_any, int& x,
                   int& y, std::optional<int>& theta) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
      error(diag::kAgentSyntax, line, "expected x,y,heading but got '" + std::string(text) + "'");
      return false;
    }
    const auto px = parse_number<int>(parts[0]);
    const auto py = parse_number<int>(parts[1]);
    if (!px || !py) {
      error(diag::kAgentSyntax, line, "non-integer coordinate in '" + std::string(text) + "'");
      return false;
    }
    x = *px;
    y = *py;
    if (allow_any && parts[2] == "any") {
      theta.reset();
      return true;
    }
    theta = parse_heading(parts[2], orientations);
    if (!theta) {
      error(diag::kUnknownHeading, line, "unknown heading '" + std::string(parts[2]) + "'");
      return false;
    }
    return true;
  }
};

}  // namespace

ScenarioParseError::ScenarioParseError(std::vector<Diagnostic> diagnostics)
    : ScenarioError([&] {
        std::string msg = "invalid scenario:";
        for (const auto& d : diagnostics) {
          msg += "\n  line " + std::to_string(d.line) + " [" + d.code + "] " + d.message;
        }
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

bool ScenarioParseError::has(std::string_view code) const {
  for (const auto& d : diagnostics_) {
    if (d.code == code) return true;
  }
  return false;
}

Grid2 Scenario::static_cost() const {
  Grid2 g(width(), height(), 0.0);
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) {
      if (blocked(x, y)) g(x, y) = kInfCost;
    }
  }
  return g;
}

std::vector<Pose> Scenario::goal_poses(std::size_t agent) const {
  std::vector<Pose> out;
  for (const GoalSpec& g : agents.at(agent).goals) {
    if (g.theta) {
      out.push_back({g.x, g.y, *g.theta});
    } else {
      for (int theta = 0; theta < orientations; ++theta) out.push_back({g.x, g.y, theta});
    }
  }
  return out;
}

CoopProblem Scenario::problem() const {
  CoopProblem p;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    p.agents.push_back({agents[i].start, goal_poses(i)});
  }
  p.static_cost = static_cost();
  p.model = build_default_model(orientations);
  p.horizon = horizon;
  p.options.collision_weight = solver.lambda_coll;
  p.options.temperature = solver.tau;
  p.options.step_size = solver.eta;
  p.options.idle_penalty = solver.idle_penalty;
  p.options.max_iters = solver.max_iters;
  return p;
}

Scenario parse_scenario(std::string_view text) {
  Reader r;
  Scenario sc;
  std::vector<PendingAgent> pending;
  bool have_horizon = false;
  bool in_map = false;
  int map_line = 0;
  std::vector<int> row_lines;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? text.size() - pos
                                                                         : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const std::string_view line = trim(raw);

    if (in_map) {
      if (line.empty()) continue;
      sc.map.emplace_back(line);
      row_lines.push_back(line_no);
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      r.error(diag::kUnknownKey, line_no, "expected 'key: value'");
      continue;
    }
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));

    auto number = [&](auto& slot, auto min_value) {
      using T = std::decay_t<decltype(slot)>;
      const auto v = parse_number<T>(value);
      if (!v || *v < min_value) {
        r.error(diag::kBadValue, line_no, "invalid value for '" + std::string(key) + "'");
        return false;
      }
      slot = *v;
      return true;
    };

    if (key == "map") {
      in_map = true;
      map_line = line_no;
    } else if (key == "name") {
      sc.name = value;
    } else if (key == "horizon") {
      have_horizon = number(sc.horizon, 0);
    } else if (key == "orientations") {
      if (number(sc.orientations, 1) && sc.orientations != 4 && sc.orientations % 8 != 0) {
        r.error(diag::kBadValue, line_no, "orientations must be 4 or a multiple of 8");
      }
    } else if (key == "tau") {
      if (number(sc.solver.tau, 0.0) && sc.solver.tau == 0.0) {
        r.error(diag::kBadValue, line_no, "tau must be positive");
      }
    } else if (key == "eta") {
      number(sc.solver.eta, 0.0);
    } else if (key == "lambda_coll") {
      if (number(sc.solver.lambda_coll, 0.0) && sc.solver.lambda_coll == 0.0) {
        r.error(diag::kBadValue, line_no, "lambda_coll must be positive");
      }
    } else if (key == "idle_penalty") {
      number(sc.solver.idle_penalty, 0.0);
    } else if (key == "max_iters") {
      number(sc.solver.max_iters, 1);
    } else if (key == "mode") {
      if (value == "soft") {
        sc.solver.mode = PoolMode::kSoft;
      } else if (value == "exact") {
        sc.solver.mode = PoolMode::kExact;
      } else {
        r.error(diag::kBadValue, line_no, "mode must be 'soft' or 'exact'");
      }
    } else if (key == "agent") {
      pending.push_back({line_no, value});
    } else {
      r.error(diag::kUnknownKey, line_no, "unknown key '" + std::string(key) + "'");
    }
  }

  if (!have_horizon) r.error(diag::kMissingHorizon, line_no, "no 'horizon:' line");

  bool map_ok = !sc.map.empty();
  if (!in_map || sc.map.empty()) {
    r.error(diag::kMissingMap, in_map ? map_line : line_no, "no map rows");
    map_ok = false;
  }
  for (std::size_t i = 0; i < sc.map.size(); ++i) {
    if (sc.map[i].size() != sc.map.front().size()) {
      r.error(diag::kRaggedMap, row_lines[i],
              "row has " + std::to_string(sc.map[i].size()) + " cells, expected " +
                  std::to_string(sc.map.front().size()));
      map_ok = false;
    }
    for (char c : sc.map[i]) {
      if (c != '.' && c != '#') {
        r.error(diag::kBadCell, row_lines[i], std::string("unknown map cell '") + c + "'");
        map_ok = false;
        break;
      }
    }
  }

  auto place = [&](int line, int x, int y, std::string_view what, std::string_view blocked_code) {
    if (!map_ok) return;
    if (x < 0 || y < 0 || x >= sc.width() || y >= sc.height()) {
      r.error(diag::kOutOfMap, line, std::string(what) + " lies outside the map");
    } else if (sc.blocked(x, y)) {
      r.error(blocked_code, line, std::string(what) + " lies on an obstacle");
    }
  };

  if (pending.empty()) r.error(diag::kNoAgents, line_no, "no 'agent:' lines");
  for (const PendingAgent& p : pending) {
    AgentEntry agent;
    bool ok = true;
    bool saw_start = false;
    bool saw_goals = false;
    for (std::string_view field : split(p.text, ' ')) {
      if (field.empty()) continue;
      const auto eq = field.find('=');
      const std::string_view k = eq == std::string_view::npos ? field : field.substr(0, eq);
      const std::string_view v = eq == std::string_view::npos ? "" : field.substr(eq + 1);
      if (k == "start") {
        saw_start = true;
        std::optional<int> theta;
        if (r.pose_fields(v, p.line, sc.orientations, false, agent.start.x, agent.start.y,
                          theta)) {
          agent.start.theta = *theta;
          place(p.line, agent.start.x, agent.start.y, "start", diag::kStartBlocked);
        } else {
          ok = false;
        }
      } else if (k == "goals" || k == "goal") {
        saw_goals = true;
        for (std::string_view g : split(v, ';')) {
          GoalSpec goal;
          if (r.pose_fields(g, p.line, sc.orientations, true, goal.x, goal.y, goal.theta)) {
            place(p.line, goal.x, goal.y, "goal", diag::kGoalBlocked);
            agent.goals.push_back(goal);
          } else {
            ok = false;
          }
        }
      } else {
        r.error(diag::kAgentSyntax, p.line, "unknown agent field '" + std::string(k) + "'");
        ok = false;
      }
    }
    if (!saw_start || !saw_goals) {
      r.error(diag::kAgentSyntax, p.line, "agent needs start= and goals=");
      ok = false;
    }
    if (ok) sc.agents.push_back(std::move(agent));
  }

  if (!r.diagnostics.empty()) {
    std::stable_sort(r.diagnostics.begin(), r.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    throw ScenarioParseError(std::move(r.diagnostics));
  }
  return sc;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream out;
  if (!sc.name.empty()) out << "name: " << sc.name << '\n';
  out << "orientations: " << sc.orientations << '\n';
  out << "horizon: " << sc.horizon << '\n';
  out << "tau: " << format_double(sc.solver.tau) << '\n';
  out << "eta: " << format_double(sc.solver.eta) << '\n';
  out << "lambda_coll: " << format_double(sc.solver.lambda_coll) << '\n';
  out << "idle_penalty: " << format_double(sc.solver.idle_penalty) << '\n';
  out << "max_iters: " << sc.solver.max_iters << '\n';
  out << "mode: " << (sc.solver.mode == PoolMode::kSoft ? "soft" : "exact") << '\n';
  for (const AgentEntry& a : sc.agents) {
    out << "agent: start=" << a.start.x << ',' << a.start.y << ','
        << heading_label(a.start.theta, sc.orientations) << " goals=";
    for (std::size_t i = 0; i < a.goals.size(); ++i) {
      const GoalSpec& g = a.goals[i];
      if (i > 0) out << ';';
      out << g.x << ',' << g.y << ','
          << (g.theta ? heading_label(*g.theta, sc.orientations) : std::string("any"));
    }
    out << '\n';
  }
  out << "map:\n";
  for (const auto& row : sc.map) out << row << '\n';
  return out.str();
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace vin
