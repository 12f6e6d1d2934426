#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netgame/game.h"
#include "netgame/graph.h"
#include "netgame/plant.h"
#include "netgame/synthesis.h"

namespace netgame {

struct PlantPerturbation {
  Matrix da, db, dc, dp;

  friend bool operator==(const PlantPerturbation&, const PlantPerturbation&);
};

struct AgentSpec {
  Matrix a, b, c, p;
  std::optional<PlantPerturbation> perturbation;
  /// Initial plant state; zero when the file omits it.
  Vector x0;

  friend bool operator==(const AgentSpec&, const AgentSpec&);
};

/// J_i = |y_i - r_i|^2 + sum_{j in N_i} |y_i - y_j|^2.
struct TargetCost {
  std::vector<Vector> targets;

  friend bool operator==(const TargetCost&, const TargetCost&);
};

/// Blocks given verbatim, one LocalCost per agent.
struct ExplicitCost {
  std::vector<LocalCost> blocks;

  friend bool operator==(const ExplicitCost&, const ExplicitCost&);
};

struct SimDefaults {
  double dt = 1e-3;
  double t_end = 100.0;
  int record_stride = 1;
  /// Tolerance used for T_conv in summaries.
  double tol = 1e-3;

  friend bool operator==(const SimDefaults&, const SimDefaults&) = default;
};

/// In-memory form of a scenario file. Agent indices are zero-based here;
/// files use one-based agent numbers.
struct Scenario {
  std::string name;
  std::size_t agent_count = 0;
  bool directed = true;
  std::vector<Edge> edges;
  std::vector<AgentSpec> agents;
  std::vector<Exosystem> exosystems;
  std::variant<TargetCost, ExplicitCost> cost;
  StrategyKind strategy = StrategyKind::kDigraph;
  SynthesisOptions synthesis;
  SimDefaults sim;

  friend bool operator==(const Scenario&, const Scenario&);
};

/// Parses and validates every cross-dimension. Throws ParseError carrying
/// the line/column of a syntax error or the JSON pointer of a bad field.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Hex SHA-256 of the canonical serialization.
std::string scenario_hash(const Scenario& s);

CommGraph graph_of(const Scenario& s);
NetworkGame game_of(const Scenario& s);
std::vector<AgentPlant> plants_of(const Scenario& s);
bool has_perturbation(const Scenario& s);
std::vector<Vector> initial_plant_states(const Scenario& s);

/// One controller per agent for `kind`. A SynthesisError names the agent
/// (one-based) that failed.
std::vector<Controller> synthesize_controllers(const Scenario& s, const NetworkGame& game,
                                               const std::vector<AgentPlant>& plants,
                                               StrategyKind kind);

/// Reads a whole file; throws std::ios_base::failure if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace netgame
