#pragma once

#include <iosfwd>
#include <vector>

#include "wsn/deployment.hpp"
#include "wsn/types.hpp"

namespace wsn {

/// What to do with nodes that have no path to the gateway.
enum class UnreachablePolicy { Error, Exclude };

using AdjacencyList = std::vector<std::vector<NodeId>>;

/// Unit-disk connectivity, hop-count zones and the routing tree for one
/// deployment. Immutable during simulation.
struct Topology {
  AdjacencyList adjacency;      // sorted, symmetric, irreflexive
  std::vector<int> zone;        // hop count from gateway; -1 for excluded
  std::vector<NodeId> parent;   // parent[gateway] == gateway
  double comm_range_cm = 0.0;
  std::vector<NodeId> excluded; // unreachable nodes dropped by policy

  std::size_t count() const { return adjacency.size(); }
  bool active(NodeId n) const { return zone[n] >= 0; }
  int max_zone() const;
};

/// Edge (u, v) iff Euclidean distance <= range_cm (boundary inclusive).
AdjacencyList connectivity(const Deployment& d, double range_cm);

/// Breadth-first hop count from the gateway; unreachable nodes get -1.
std::vector<int> assign_zones(const AdjacencyList& adjacency, NodeId gateway);

/// parent(n) = lowest-id neighbor one zone closer to the gateway.
/// Nodes with zone -1 are skipped (parent = self). Throws SimulationError
/// on an internal inconsistency (reachable node with no lower-zone
/// neighbor).
std::vector<NodeId> build_routing(const AdjacencyList& adjacency,
                                  const std::vector<int>& zones);

/// Full pipeline: connectivity -> zones -> routing. With policy Error a
/// disconnected deployment throws DisconnectedTopologyError; with Exclude
/// the unreachable nodes are dropped from the simulation and listed in
/// Topology::excluded.
Topology build_topology(const Deployment& d, double range_cm,
                        UnreachablePolicy policy = UnreachablePolicy::Error);

/// Plain-text dump: `edge u v` lines followed by an `id zone parent` table.
void write_topology(std::ostream& out, const Topology& t);

}  // namespace wsn
