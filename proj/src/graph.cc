#include "netgame/graph.h"

#include <algorithm>
#include <deque>
#include <sstream>

#include "netgame/errors.h"

namespace netgame {

std::string_view to_string(Connectivity c) {
  switch (c) {
    case Connectivity::kDisconnected: return "disconnected";
    case Connectivity::kConnectedUndirected: return "connected-undirected";
    case Connectivity::kWeaklyConnected: return "weakly-connected";
    case Connectivity::kStronglyConnected: return "strongly-connected";
  }
  return "disconnected";
}

CommGraph::CommGraph(std::size_t agent_count, bool directed,
                     std::vector<Edge> edges)
    : agent_count_(agent_count), directed_(directed) {
  if (agent_count == 0) throw DomainError("CommGraph: no agents");
  for (const Edge& e : edges) {
    if (e.source >= agent_count || e.sink >= agent_count) {
      std::ostringstream os;
      os << "CommGraph: edge (" << e.source + 1 << ", " << e.sink + 1
         << ") has an endpoint outside 1.." << agent_count;
      throw DomainError(os.str());
    }
    if (e.source == e.sink) {
      std::ostringstream os;
      os << "CommGraph: self-edge at agent " << e.source + 1;
      throw DomainError(os.str());
    }
  }
  if (!directed) {
    const std::size_t given = edges.size();
    for (std::size_t k = 0; k < given; ++k) {
      edges.push_back({edges[k].sink, edges[k].source});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  in_neighbors_.assign(agent_count, {});
  for (const Edge& e : edges_) in_neighbors_[e.sink].push_back(e.source);
  for (auto& n : in_neighbors_) std::sort(n.begin(), n.end());
}

const std::vector<AgentIndex>& CommGraph::neighbors(AgentIndex i) const {
  if (i >= agent_count_) {
    std::ostringstream os;
    os << "neighbors: agent index " << i << " out of range (N = "
       << agent_count_ << ")";
    throw std::out_of_range(os.str());
  }
  return in_neighbors_[i];
}

bool CommGraph::is_neighbor(AgentIndex i, AgentIndex j) const {
  const auto& n = neighbors(i);
  return std::binary_search(n.begin(), n.end(), j);
}

AcyclicResult check_acyclic(const CommGraph& g) {
  if (!g.directed()) {
    throw DomainError("check_acyclic: defined for directed graphs only");
  }
  const std::size_t n = g.agent_count();
  std::vector<std::vector<AgentIndex>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const Edge& e : g.edges()) {
    out[e.source].push_back(e.sink);
    ++indegree[e.sink];
  }

  AcyclicResult result;
  // Smallest ready index first, so a graph already labelled in order keeps
  // its labels.
  std::vector<AgentIndex> ready;
  for (AgentIndex i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    const AgentIndex v = *it;
    ready.erase(it);
    result.order.push_back(v);
    for (AgentIndex w : out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (result.order.size() == n) {
    result.acyclic = true;
    return result;
  }
  result.order.clear();

  // Every remaining vertex has a predecessor that also remains; walking
  // predecessors must revisit a vertex.
  std::vector<bool> remaining(n, false);
  for (AgentIndex i = 0; i < n; ++i) remaining[i] = indegree[i] > 0;
  AgentIndex start = 0;
  while (!remaining[start]) ++start;
  std::vector<int> seen_at(n, -1);
  std::vector<AgentIndex> walk;
  AgentIndex v = start;
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<int>(walk.size());
    walk.push_back(v);
    for (AgentIndex p : g.neighbors(v)) {
      if (remaining[p]) {
        v = p;
        break;
      }
    }
  }
  // walk follows edges backwards; reverse the closed segment.
  std::vector<AgentIndex> cycle(walk.begin() + seen_at[v], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  cycle.push_back(cycle.front());
  result.cycle = std::move(cycle);
  return result;
}

namespace {

std::vector<bool> reachable(std::size_t n,
                            const std::vector<std::vector<AgentIndex>>& adj,
                            AgentIndex from) {
  std::vector<bool> seen(n, false);
  std::deque<AgentIndex> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const AgentIndex v = queue.front();
    queue.pop_front();
    for (AgentIndex w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

Connectivity check_connected(const CommGraph& g) {
  const std::size_t n = g.agent_count();
  std::vector<std::vector<AgentIndex>> fwd(n), bwd(n), skeleton(n);
  for (const Edge& e : g.edges()) {
    fwd[e.source].push_back(e.sink);
    bwd[e.sink].push_back(e.source);
    skeleton[e.source].push_back(e.sink);
    skeleton[e.sink].push_back(e.source);
  }
  if (!all_true(reachable(n, skeleton, 0))) return Connectivity::kDisconnected;
  if (!g.directed()) return Connectivity::kConnectedUndirected;
  if (all_true(reachable(n, fwd, 0)) && all_true(reachable(n, bwd, 0))) {
    return Connectivity::kStronglyConnected;
  }
  return Connectivity::kWeaklyConnected;
}

}  // namespace netgame
