#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "wsn/errors.hpp"
#include "wsn/rng.hpp"
#include "wsn/topology.hpp"

using namespace wsn;

namespace {

Deployment line_deployment(std::size_t count, double spacing_cm) {
  Deployment d;
  d.kind = DeploymentKind::Random;
  d.area = {spacing_cm * count, 10.0};
  for (std::size_t i = 0; i < count; ++i)
    d.positions.push_back({spacing_cm * i, 0.0});
  return d;
}

// Independent shortest-path oracle: repeated single-source relaxation
// (Bellman-Ford style), nothing shared with the BFS implementation.
std::vector<int> relaxation_distances(const AdjacencyList& adj, NodeId root) {
  const std::size_t n = adj.size();
  const int inf = 1 << 29;
  std::vector<int> dist(n, inf);
  dist[root] = 0;
  for (std::size_t pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (dist[u] == inf) continue;
      for (NodeId v : adj[u]) {
        if (dist[u] + 1 < dist[v]) {
          dist[v] = dist[u] + 1;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  for (auto& d : dist)
    if (d == inf) d = -1;
  return dist;
}

AdjacencyList random_graph(std::size_t n, Rng& rng, double edge_prob) {
  AdjacencyList adj(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.unit() < edge_prob) {
        adj[u].push_back(static_cast<NodeId>(v));
        adj[v].push_back(static_cast<NodeId>(u));
      }
  return adj;
}

}  // namespace

TEST_CASE("connectivity boundary is inclusive") {
  Deployment d;
  d.area = {300.0, 10.0};
  d.positions = {{0.0, 0.0}, {150.0, 0.0}, {300.0 + 0.5, 0.0}};
  d.positions[2].x_cm = 300.0;  // exactly one range from node 1
  const auto adj = connectivity(d, 150.0);
  CHECK(adj[0] == std::vector<NodeId>{1});
  CHECK(adj[1] == std::vector<NodeId>{0, 2});
  CHECK(adj[2] == std::vector<NodeId>{1});
}

TEST_CASE("isolated node has an empty neighbor set") {
  Deployment d;
  d.area = {1000.0, 10.0};
  d.positions = {{0.0, 0.0}, {100.0, 0.0}, {900.0, 0.0}};
  const auto adj = connectivity(d, 150.0);
  CHECK(adj[2].empty());
}

TEST_CASE("connectivity equals a brute-force distance oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Deployment d = deploy_random(50, {800.0, 500.0}, seed);
    const auto adj = connectivity(d, 150.0);
    for (std::size_t u = 0; u < d.count(); ++u) {
      for (std::size_t v = 0; v < d.count(); ++v) {
        if (u == v) {
          CHECK(std::find(adj[u].begin(), adj[u].end(), v) == adj[u].end());
          continue;
        }
        const bool expect = distance_cm(d.positions[u], d.positions[v]) <= 150.0;
        const bool have =
            std::find(adj[u].begin(), adj[u].end(), static_cast<NodeId>(v)) !=
            adj[u].end();
        CHECK(have == expect);
      }
    }
  }
}

TEST_CASE("connectivity is symmetric and irreflexive") {
  const Deployment d = deploy_random(60, {800.0, 500.0}, 5);
  const auto adj = connectivity(d, 120.0);
  for (std::size_t u = 0; u < d.count(); ++u) {
    for (NodeId v : adj[u]) {
      CHECK(v != u);
      CHECK(std::find(adj[v].begin(), adj[v].end(), static_cast<NodeId>(u)) !=
            adj[v].end());
    }
  }
}

TEST_CASE("zones: gateway at zero, path graph counts hops") {
  const Deployment d = line_deployment(3, 100.0);
  const auto adj = connectivity(d, 150.0);
  const auto zones = assign_zones(adj, 0);
  CHECK(zones == std::vector<int>{0, 1, 2});
}

TEST_CASE("zones match an independent relaxation oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto adj = random_graph(15, rng, 0.18);
    const auto zones = assign_zones(adj, 0);
    const auto oracle = relaxation_distances(adj, 0);
    CHECK(zones == oracle);
  }
}

TEST_CASE("zone edge property |z(u)-z(v)| <= 1") {
  const Deployment d = deploy_random(50, {800.0, 500.0}, 17);
  const auto adj = connectivity(d, 160.0);
  const auto zones = assign_zones(adj, 0);
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (NodeId v : adj[u])
      if (zones[u] >= 0 && zones[v] >= 0)
        CHECK(std::abs(zones[u] - zones[v]) <= 1);
}

TEST_CASE("routing: parent one zone closer, lowest id wins ties") {
  // star-ish graph: 0 - {1,2}, both 1 and 2 - 3
  AdjacencyList adj(4);
  auto link = [&](NodeId a, NodeId b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  link(0, 1);
  link(0, 2);
  link(1, 3);
  link(2, 3);
  for (auto& l : adj) std::sort(l.begin(), l.end());
  const auto zones = assign_zones(adj, 0);
  const auto parent = build_routing(adj, zones);
  CHECK(parent[1] == 0);
  CHECK(parent[2] == 0);
  CHECK(parent[3] == 1);  // {1, 2} both one zone up; 1 is the lower id
}

TEST_CASE("parent chains decrease zone by one down to the gateway") {
  const Deployment d = deploy_random(50, {800.0, 500.0}, 400);
  const Topology t = build_topology(d, 190.0, UnreachablePolicy::Exclude);
  for (std::size_t i = 0; i < t.count(); ++i) {
    if (!t.active(static_cast<NodeId>(i))) continue;
    NodeId cur = static_cast<NodeId>(i);
    int steps = 0;
    while (cur != kGatewayId) {
      const NodeId p = t.parent[cur];
      CHECK(t.zone[p] == t.zone[cur] - 1);
      CHECK(std::find(t.adjacency[cur].begin(), t.adjacency[cur].end(), p) !=
            t.adjacency[cur].end());
      cur = p;
      REQUIRE(++steps <= static_cast<int>(t.count()));
    }
    CHECK(steps == t.zone[i]);
  }
}

TEST_CASE("connectivity is invariant under node relabeling") {
  const Deployment d = deploy_random(20, {400.0, 400.0}, 88);
  const auto adj = connectivity(d, 140.0);

  // permute the non-gateway nodes
  Rng rng(5);
  std::vector<std::size_t> perm(d.count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 2; --i)
    std::swap(perm[i - 1], perm[1 + rng.below(static_cast<std::uint32_t>(i - 1))]);

  Deployment pd = d;
  for (std::size_t i = 0; i < perm.size(); ++i)
    pd.positions[perm[i]] = d.positions[i];
  const auto padj = connectivity(pd, 140.0);

  for (std::size_t u = 0; u < adj.size(); ++u) {
    for (NodeId v : adj[u]) {
      const NodeId pu = static_cast<NodeId>(perm[u]);
      const NodeId pv = static_cast<NodeId>(perm[v]);
      CHECK(std::find(padj[pu].begin(), padj[pu].end(), pv) != padj[pu].end());
    }
  }
}

TEST_CASE("disconnected topology: error by default, exclusion on request") {
  Deployment d;
  d.area = {1000.0, 10.0};
  d.positions = {{0.0, 0.0}, {100.0, 0.0}, {900.0, 0.0}, {950.0, 0.0}};
  CHECK_THROWS_AS(build_topology(d, 150.0, UnreachablePolicy::Error),
                  DisconnectedTopologyError);

  const Topology t = build_topology(d, 150.0, UnreachablePolicy::Exclude);
  CHECK(t.excluded == std::vector<NodeId>{2, 3});
  CHECK_FALSE(t.active(2));
  CHECK_FALSE(t.active(3));
  CHECK(t.active(1));
  CHECK(t.adjacency[2].empty());
  CHECK(t.max_zone() == 1);
}

TEST_CASE("topology dump contains edges and the id/zone/parent table") {
  const Deployment d = line_deployment(3, 100.0);
  const Topology t = build_topology(d, 150.0);
  std::ostringstream out;
  write_topology(out, t);
  const std::string s = out.str();
  CHECK(s.find("edge 0 1") != std::string::npos);
  CHECK(s.find("edge 1 2") != std::string::npos);
  CHECK(s.find("2 2 1") != std::string::npos);  // id zone parent
}
