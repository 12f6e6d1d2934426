#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace netgame {

/// Agent indices are zero-based in the C++ API. Scenario files use one-based
/// numbering and are translated at load time.
using AgentIndex = std::size_t;

/// Directed edge: `sink` receives the output of `source` (source is in the
/// neighbor set of sink).
struct Edge {
  AgentIndex source = 0;
  AgentIndex sink = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Connectivity {
  kDisconnected,
  kConnectedUndirected,
  kWeaklyConnected,
  kStronglyConnected,
};

std::string_view to_string(Connectivity c);

struct AcyclicResult {
  bool acyclic = false;
  /// Topological order (sources first) when acyclic.
  std::vector<AgentIndex> order;
  /// One directed cycle v0 -> v1 -> ... -> v0 (first vertex repeated) when
  /// not acyclic.
  std::vector<AgentIndex> cycle;
};

/// Communication topology. Immutable after construction. Undirected graphs
/// store both orientations of every edge.
class CommGraph {
 public:
  CommGraph() = default;
  CommGraph(std::size_t agent_count, bool directed, std::vector<Edge> edges);

  std::size_t agent_count() const { return agent_count_; }
  bool directed() const { return directed_; }
  /// Sorted, deduplicated; symmetric when undirected.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Agents whose outputs agent `i` receives, ascending.
  const std::vector<AgentIndex>& neighbors(AgentIndex i) const;
  bool is_neighbor(AgentIndex i, AgentIndex j) const;

  friend bool operator==(const CommGraph&, const CommGraph&) = default;

 private:
  std::size_t agent_count_ = 0;
  bool directed_ = true;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentIndex>> in_neighbors_;
};

/// Kahn's algorithm; a directed cycle is returned as witness on failure.
/// Throws DomainError for undirected graphs.
AcyclicResult check_acyclic(const CommGraph& g);

Connectivity check_connected(const CommGraph& g);

}  // namespace netgame
