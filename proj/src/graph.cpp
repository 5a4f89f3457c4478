#include "pushsum/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "pushsum/error.hpp"

namespace pushsum {

DirectedGraph::DirectedGraph(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 0) throw InvalidArgument("negative node count");
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= node_count_ || e.to < 0 || e.to >= node_count_) {
      throw InvalidArgument("edge (" + std::to_string(e.from) + ", " +
                            std::to_string(e.to) + ") outside node range [0, " +
                            std::to_string(node_count_) + ")");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw InvalidArgument("duplicate edge (" + std::to_string(dup->from) + ", " +
                          std::to_string(dup->to) + ")");
  }

  const auto n = static_cast<std::size_t>(node_count_);
  out_.resize(n);
  in_.resize(n);
  out_edges_.resize(n);
  in_edges_.resize(n);
  for (std::size_t h = 0; h < edges_.size(); ++h) {
    const Edge& e = edges_[h];
    out_[e.from].push_back(e.to);
    out_edges_[e.from].push_back(h);
    in_[e.to].push_back(e.from);
    in_edges_[e.to].push_back(h);
  }
  // Edges are sorted by (from, to), so out lists are already ordered and in
  // lists are filled in increasing `from`.
}

DirectedGraph DirectedGraph::ring(int node_count) {
  std::vector<Edge> edges;
  if (node_count >= 2) {
    for (int i = 0; i < node_count; ++i) edges.push_back({i, (i + 1) % node_count});
  }
  return DirectedGraph(node_count, std::move(edges));
}

DirectedGraph DirectedGraph::ring_with_chord(int node_count) {
  if (node_count < 3) throw InvalidArgument("ring with chord needs at least 3 nodes");
  std::vector<Edge> edges;
  for (int i = 0; i < node_count; ++i) edges.push_back({i, (i + 1) % node_count});
  edges.push_back({0, 2});
  return DirectedGraph(node_count, std::move(edges));
}

DirectedGraph DirectedGraph::bidirectional_ring(int node_count) {
  std::vector<Edge> edges;
  for (int i = 0; i < node_count && node_count >= 2; ++i) {
    int j = (i + 1) % node_count;
    edges.push_back({i, j});
    edges.push_back({j, i});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return DirectedGraph(node_count, std::move(edges));
}

DirectedGraph DirectedGraph::complete(int node_count) {
  std::vector<Edge> edges;
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (i != j) edges.push_back({i, j});
    }
  }
  return DirectedGraph(node_count, std::move(edges));
}

void DirectedGraph::check_node(NodeId node) const {
  if (node < 0 || node >= node_count_) {
    throw InvalidArgument("node " + std::to_string(node) + " outside [0, " +
                          std::to_string(node_count_) + ")");
  }
}

bool DirectedGraph::has_edge(NodeId from, NodeId to) const {
  return edge_index(from, to).has_value();
}

std::optional<std::size_t> DirectedGraph::edge_index(NodeId from, NodeId to) const {
  Edge key{from, to};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::span<const NodeId> DirectedGraph::out_neighbors(NodeId node) const {
  check_node(node);
  return out_[node];
}

std::span<const NodeId> DirectedGraph::in_neighbors(NodeId node) const {
  check_node(node);
  return in_[node];
}

int DirectedGraph::out_degree(NodeId node) const {
  return static_cast<int>(out_neighbors(node).size());
}

int DirectedGraph::in_degree(NodeId node) const {
  return static_cast<int>(in_neighbors(node).size());
}

std::span<const std::size_t> DirectedGraph::out_edge_indices(NodeId node) const {
  check_node(node);
  return out_edges_[node];
}

std::span<const std::size_t> DirectedGraph::in_edge_indices(NodeId node) const {
  check_node(node);
  return in_edges_[node];
}

bool DirectedGraph::has_all_self_loops() const {
  for (NodeId i = 0; i < node_count_; ++i) {
    if (!has_self_loop(i)) return false;
  }
  return true;
}

bool DirectedGraph::has_any_self_loop() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.from == e.to; });
}

bool DirectedGraph::is_symmetric() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [this](const Edge& e) { return has_edge(e.to, e.from); });
}

DirectedGraph DirectedGraph::with_self_loops() const {
  std::vector<Edge> edges = edges_;
  for (NodeId i = 0; i < node_count_; ++i) {
    if (!has_self_loop(i)) edges.push_back({i, i});
  }
  return DirectedGraph(node_count_, std::move(edges));
}

DirectedGraph DirectedGraph::without_self_loops() const {
  std::vector<Edge> edges;
  for (const Edge& e : edges_) {
    if (e.from != e.to) edges.push_back(e);
  }
  return DirectedGraph(node_count_, std::move(edges));
}

namespace {

std::vector<bool> bfs(const DirectedGraph& g, NodeId start, bool reverse) {
  std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
  std::deque<NodeId> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    auto next = reverse ? g.in_neighbors(v) : g.out_neighbors(v);
    for (NodeId w : next) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(const DirectedGraph& g) {
  if (g.node_count() < 1) throw InvalidArgument("strong connectivity of an empty graph");
  auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return all(bfs(g, 0, false)) && all(bfs(g, 0, true));
}

DirectedGraph union_graphs(std::span<const DirectedGraph> graphs) {
  if (graphs.empty()) throw InvalidArgument("union of an empty graph sequence");
  const int n = graphs.front().node_count();
  std::vector<Edge> edges;
  for (const DirectedGraph& g : graphs) {
    if (g.node_count() != n) throw InvalidArgument("union of graphs with different node counts");
    edges.insert(edges.end(), g.edges().begin(), g.edges().end());
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return DirectedGraph(n, std::move(edges));
}

std::vector<NodeId> reachable_set(std::span<const DirectedGraph> graphs,
                                  NodeId origin, int k1, int k2) {
  if (k1 < 0 || k1 > k2) throw InvalidArgument("reachable_set needs 0 <= k1 <= k2");
  if (static_cast<std::size_t>(k2) >= graphs.size()) {
    throw InvalidArgument("graph sequence does not cover the window");
  }
  const int n = graphs[k1].node_count();
  if (origin < 0 || origin >= n) {
    throw InvalidArgument("origin " + std::to_string(origin) + " outside node range");
  }
  std::vector<bool> current(static_cast<std::size_t>(n), false);
  current[origin] = true;
  for (int k = k1; k <= k2; ++k) {
    const DirectedGraph& g = graphs[k];
    if (g.node_count() != n) throw InvalidArgument("graph sequence changes node count");
    std::vector<bool> next(static_cast<std::size_t>(n), false);
    for (const Edge& e : g.edges()) {
      if (current[e.from]) next[e.to] = true;
    }
    current = std::move(next);
  }
  std::vector<NodeId> out;
  for (NodeId i = 0; i < n; ++i) {
    if (current[i]) out.push_back(i);
  }
  return out;
}

DirectedGraph graph_of_matrix(const DenseMatrix& a, double alpha) {
  if (!a.is_square()) throw InvalidArgument("graph_of_matrix needs a square matrix");
  if (alpha < 0.0) throw InvalidArgument("threshold must be non-negative");
  const auto n = a.rows();
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double v = a(r, c);
      if (v < 0.0) throw InvalidArgument("graph_of_matrix needs non-negative entries");
      // Entry (j, i) carries mass from i to j.
      if (v > 0.0 && v >= alpha) {
        edges.push_back({static_cast<NodeId>(c), static_cast<NodeId>(r)});
      }
    }
  }
  return DirectedGraph(static_cast<int>(n), std::move(edges));
}

}  // namespace pushsum
