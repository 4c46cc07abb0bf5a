#include "wsn/topology.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <string>

#include "wsn/errors.hpp"

namespace wsn {

int Topology::max_zone() const {
  int m = 0;
  for (int z : zone) m = std::max(m, z);
  return m;
}

AdjacencyList connectivity(const Deployment& d, double range_cm) {
  if (!(range_cm > 0.0)) throw ConfigError("communication range must be positive");
  const std::size_t n = d.count();
  AdjacencyList adj(n);
  const double r2 = range_cm * range_cm;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double dx = d.positions[u].x_cm - d.positions[v].x_cm;
      const double dy = d.positions[u].y_cm - d.positions[v].y_cm;
      if (dx * dx + dy * dy <= r2) {
        adj[u].push_back(static_cast<NodeId>(v));
        adj[v].push_back(static_cast<NodeId>(u));
      }
    }
  }
  return adj;
}

std::vector<int> assign_zones(const AdjacencyList& adjacency, NodeId gateway) {
  const std::size_t n = adjacency.size();
  if (gateway >= n) throw ConfigError("gateway id out of range");
  std::vector<int> zone(n, -1);
  std::deque<NodeId> frontier;
  zone[gateway] = 0;
  frontier.push_back(gateway);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : adjacency[u]) {
      if (zone[v] < 0) {
        zone[v] = zone[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return zone;
}

std::vector<NodeId> build_routing(const AdjacencyList& adjacency,
                                  const std::vector<int>& zones) {
  const std::size_t n = adjacency.size();
  std::vector<NodeId> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<NodeId>(i);
  for (std::size_t i = 0; i < n; ++i) {
    if (zones[i] <= 0) continue;  // gateway and excluded nodes keep self
    bool found = false;
    for (NodeId v : adjacency[i]) {  // neighbor lists are sorted, first hit is lowest id
      if (zones[v] == zones[i] - 1) {
        parent[i] = v;
        found = true;
        break;
      }
    }
    if (!found)
      throw SimulationError("routing: node " + std::to_string(i) +
                            " in zone " + std::to_string(zones[i]) +
                            " has no lower-zone neighbor");
  }
  return parent;
}

Topology build_topology(const Deployment& d, double range_cm,
                        UnreachablePolicy policy) {
  Topology t;
  t.comm_range_cm = range_cm;
  t.adjacency = connectivity(d, range_cm);
  t.zone = assign_zones(t.adjacency, kGatewayId);

  for (std::size_t i = 0; i < t.zone.size(); ++i)
    if (t.zone[i] < 0) t.excluded.push_back(static_cast<NodeId>(i));

  if (!t.excluded.empty()) {
    if (policy == UnreachablePolicy::Error)
      throw DisconnectedTopologyError(
          std::to_string(t.excluded.size()) +
          " node(s) unreachable from the gateway (first: node " +
          std::to_string(t.excluded.front()) + ")");
    // Exclude: drop the stragglers from every adjacency list so they play
    // no further part.
    for (auto& nbrs : t.adjacency) {
      nbrs.erase(std::remove_if(nbrs.begin(), nbrs.end(),
                                [&](NodeId v) { return t.zone[v] < 0; }),
                 nbrs.end());
    }
    for (NodeId ex : t.excluded) t.adjacency[ex].clear();
  }

  t.parent = build_routing(t.adjacency, t.zone);
  return t;
}

void write_topology(std::ostream& out, const Topology& t) {
  out << "# edges (undirected, listed once)\n";
  for (std::size_t u = 0; u < t.adjacency.size(); ++u)
    for (NodeId v : t.adjacency[u])
      if (u < v) out << "edge " << u << " " << v << "\n";
  out << "# id zone parent\n";
  for (std::size_t i = 0; i < t.zone.size(); ++i)
    out << i << " " << t.zone[i] << " " << t.parent[i] << "\n";
  if (!t.excluded.empty()) {
    out << "# excluded:";
    for (NodeId ex : t.excluded) out << " " << ex;
    out << "\n";
  }
}

}  // namespace wsn
