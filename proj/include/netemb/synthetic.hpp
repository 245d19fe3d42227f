#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/graph.hpp"
#include "netemb/rng.hpp"

namespace netemb {

// Two-block-parameter stochastic block model; nodes are grouped
// contiguously, block(v) = v / per_block.
inline Graph generate_sbm(std::size_t blocks, std::size_t per_block, double p_in,
                          double p_out, Rng& rng) {
  if (blocks == 0 || per_block == 0) throw InputError("sbm: empty block structure");
  std::size_t n = blocks * per_block;
  std::vector<Graph::Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      bool same = (u / per_block) == (v / per_block);
      if (rng.uniform() < (same ? p_in : p_out)) edges.push_back({u, v, 1.0});
    }
  return Graph::from_edges(n, edges);
}

// Two m-cliques joined by a single bridge edge between node 0 and node m.
// Node v in the first clique mirrors node v + m in the second.
inline Graph generate_barbell(std::size_t m) {
  if (m < 2) throw InputError("barbell: clique size must be >= 2");
  std::vector<Graph::Edge> edges;
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = u + 1; v < m; ++v) {
      edges.push_back({u, v, 1.0});
      edges.push_back({m + u, m + v, 1.0});
    }
  edges.push_back({0, m, 1.0});
  return Graph::from_edges(2 * m, edges);
}

// Star: center 0 with `leaves` spokes.
inline Graph generate_star(std::size_t leaves) {
  if (leaves == 0) throw InputError("star: need at least one leaf");
  std::vector<Graph::Edge> edges;
  for (std::size_t v = 1; v <= leaves; ++v) edges.push_back({0, v, 1.0});
  return Graph::from_edges(leaves + 1, edges);
}

// Hub 0, spokes of length two: hub - mid_i - leaf_i. Leaves sit exactly two
// hops from the hub, with the mid node as their only shared neighbor.
inline Graph generate_two_hop_star(std::size_t spokes) {
  if (spokes == 0) throw InputError("two_hop_star: need at least one spoke");
  std::vector<Graph::Edge> edges;
  for (std::size_t i = 0; i < spokes; ++i) {
    std::size_t mid = 1 + 2 * i, leaf = 2 + 2 * i;
    edges.push_back({0, mid, 1.0});
    edges.push_back({mid, leaf, 1.0});
  }
  return Graph::from_edges(1 + 2 * spokes, edges);
}

// Three node types, two clusters per type, `per_cluster` nodes in each; a
// hyperedge joins every cross-type triple drawn from one cluster. Total true
// hyperedges: 2 * per_cluster^3.
//
// Node id layout: type t, cluster c, slot s  ->  t*(2*per_cluster) +
// c*per_cluster + s. Cluster of node v: (v % (2*per_cluster)) / per_cluster.
inline HyperGraph generate_three_type_cluster_hypergraph(std::size_t per_cluster) {
  if (per_cluster == 0) throw InputError("three_type_cluster: empty clusters");
  std::size_t per_type = 2 * per_cluster;
  std::vector<int> types(3 * per_type);
  for (std::size_t v = 0; v < types.size(); ++v)
    types[v] = static_cast<int>(v / per_type);
  auto node_id = [&](std::size_t t, std::size_t c, std::size_t s) {
    return t * per_type + c * per_cluster + s;
  };
  std::vector<std::vector<std::size_t>> edges;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < per_cluster; ++i)
      for (std::size_t j = 0; j < per_cluster; ++j)
        for (std::size_t k = 0; k < per_cluster; ++k)
          edges.push_back({node_id(0, c, i), node_id(1, c, j), node_id(2, c, k)});
  return HyperGraph(3, types, edges);
}

inline std::size_t three_type_cluster_of(std::size_t v, std::size_t per_cluster) {
  return (v % (2 * per_cluster)) / per_cluster;
}

}  // namespace netemb
