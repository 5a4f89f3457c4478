#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pushsum/dense_matrix.hpp"

namespace pushsum {

// Nodes are dense zero-based integers 0..n-1.
using NodeId = int;

// Directed link from `from` to `to`.
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Fixed node set with a canonical (lexicographically sorted) edge list.
// The position of an edge in edges() is its stable index; the robust
// protocol uses it as the buffer index.
//
// Immutable after construction.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Throws InvalidArgument on duplicate edges or endpoints outside [0, n).
  DirectedGraph(int node_count, std::vector<Edge> edges);

  static DirectedGraph empty(int node_count) { return DirectedGraph(node_count, {}); }
  // i -> i+1 (mod n).
  static DirectedGraph ring(int node_count);
  // Ring plus chord 0 -> 2 (needs n >= 3).
  static DirectedGraph ring_with_chord(int node_count);
  // i -> i+1 and i+1 -> i (mod n).
  static DirectedGraph bidirectional_ring(int node_count);
  // Every ordered pair i != j.
  static DirectedGraph complete(int node_count);

  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  bool has_edge(NodeId from, NodeId to) const;
  std::optional<std::size_t> edge_index(NodeId from, NodeId to) const;

  // Sorted neighbor lists (self included when a self-loop exists).
  std::span<const NodeId> out_neighbors(NodeId node) const;
  std::span<const NodeId> in_neighbors(NodeId node) const;
  int out_degree(NodeId node) const;
  int in_degree(NodeId node) const;

  // Indices (into edges()) of the links leaving / entering a node.
  std::span<const std::size_t> out_edge_indices(NodeId node) const;
  std::span<const std::size_t> in_edge_indices(NodeId node) const;

  bool has_self_loop(NodeId node) const { return has_edge(node, node); }
  bool has_all_self_loops() const;
  bool has_any_self_loop() const;
  bool is_symmetric() const;

  DirectedGraph with_self_loops() const;
  DirectedGraph without_self_loops() const;

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  void check_node(NodeId node) const;

  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<std::size_t>> out_edges_;
  std::vector<std::vector<std::size_t>> in_edges_;
};

// True iff every node reaches every other node along directed paths.
// Throws InvalidArgument for a graph with no nodes.
bool is_strongly_connected(const DirectedGraph& g);

// Edge-set union of graphs over the same node set.
DirectedGraph union_graphs(std::span<const DirectedGraph> graphs);

// Nodes b reachable from `origin` along an edge chain e^{k1}, ..., e^{k2}
// with e^k taken from graphs[k] (one hop per step). Sorted.
std::vector<NodeId> reachable_set(std::span<const DirectedGraph> graphs,
                                  NodeId origin, int k1, int k2);

// Graph associated with a non-negative square matrix after thresholding:
// edge (i, j) iff A(j, i) > 0 and A(j, i) >= alpha. Entries equal to alpha
// survive. alpha = 0 gives the plain support graph.
DirectedGraph graph_of_matrix(const DenseMatrix& a, double alpha = 0.0);

}  // namespace pushsum
