#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "pushsum/error.hpp"
#include "pushsum/graph.hpp"
#include "test_util.hpp"

using namespace pushsum;

namespace {

// Transitive closure by repeated relaxation over an adjacency matrix.
bool brute_force_strongly_connected(const DirectedGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) reach[i][i] = true;
  for (const Edge& e : g.edges()) reach[e.from][e.to] = true;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!reach[i][j]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("graph construction validates edges") {
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 1}, {0, 1}}), InvalidArgument);
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 2}}), InvalidArgument);
  CHECK_THROWS_AS(DirectedGraph(2, {{-1, 0}}), InvalidArgument);
  const DirectedGraph g(3, {{2, 0}, {0, 1}, {1, 2}});
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[2] == Edge{2, 0});
  CHECK(g.edge_index(1, 2) == 1u);
  CHECK_FALSE(g.edge_index(2, 1).has_value());
}

TEST_CASE("neighbor lists and degrees") {
  const auto g = DirectedGraph::ring_with_chord(5);
  CHECK(g.edge_count() == 6);
  CHECK(g.out_degree(0) == 2);
  CHECK(g.out_degree(1) == 1);
  CHECK(g.in_degree(2) == 2);
  const auto in2 = g.in_neighbors(2);
  CHECK(std::vector<NodeId>(in2.begin(), in2.end()) == std::vector<NodeId>{0, 1});
  CHECK_FALSE(g.has_any_self_loop());
  const auto loops = g.with_self_loops();
  CHECK(loops.has_all_self_loops());
  CHECK(loops.out_degree(0) == 3);
  CHECK(loops.without_self_loops() == g);
  CHECK(DirectedGraph::bidirectional_ring(4).is_symmetric());
  CHECK_FALSE(DirectedGraph::ring(4).is_symmetric());
  CHECK(DirectedGraph::complete(4).edge_count() == 12);
}

TEST_CASE("is_strongly_connected examples") {
  CHECK(is_strongly_connected(DirectedGraph(2, {{0, 1}, {1, 0}})));
  CHECK_FALSE(is_strongly_connected(DirectedGraph(2, {{0, 1}})));
  CHECK(is_strongly_connected(DirectedGraph::ring(5)));
  CHECK(is_strongly_connected(DirectedGraph::empty(1)));
  CHECK_THROWS_AS(is_strongly_connected(DirectedGraph::empty(0)), InvalidArgument);
}

TEST_CASE("is_strongly_connected agrees with brute force on every digraph up to 4 nodes") {
  for (int n = 1; n <= 4; ++n) {
    const unsigned subsets = 1u << (n * n);
    for (unsigned mask = 0; mask < subsets; ++mask) {
      const auto g = testutil::graph_from_mask(n, mask);
      REQUIRE_MESSAGE(is_strongly_connected(g) == brute_force_strongly_connected(g),
                      "n=" << n << " mask=" << mask);
    }
  }
}

TEST_CASE("union_graphs examples and errors") {
  const std::array<DirectedGraph, 2> a{DirectedGraph(2, {{0, 1}}), DirectedGraph(2, {{1, 0}})};
  CHECK(union_graphs(a) == DirectedGraph(2, {{0, 1}, {1, 0}}));
  const std::array<DirectedGraph, 2> b{DirectedGraph::empty(2), DirectedGraph::empty(2)};
  CHECK(union_graphs(b).edge_count() == 0);
  const std::array<DirectedGraph, 2> c{DirectedGraph(2, {{0, 1}}), DirectedGraph(2, {{0, 1}})};
  CHECK(union_graphs(c) == DirectedGraph(2, {{0, 1}}));
  const std::array<DirectedGraph, 2> mismatched{DirectedGraph::empty(2), DirectedGraph::empty(3)};
  CHECK_THROWS_AS(union_graphs(mismatched), InvalidArgument);
  CHECK_THROWS_AS(union_graphs(std::span<const DirectedGraph>{}), InvalidArgument);
}

TEST_CASE("union_graphs has an edge iff some input has it, all pairs of 2- and 3-node graphs") {
  for (int n = 2; n <= 3; ++n) {
    const unsigned subsets = 1u << (n * n);
    // Every pair for n = 2, a stride through the pairs for n = 3.
    const unsigned stride = n == 2 ? 1 : 7;
    for (unsigned m1 = 0; m1 < subsets; m1 += stride) {
      for (unsigned m2 = 0; m2 < subsets; m2 += stride) {
        const std::array<DirectedGraph, 2> gs{testutil::graph_from_mask(n, m1),
                                             testutil::graph_from_mask(n, m2)};
        REQUIRE(union_graphs(gs) == testutil::graph_from_mask(n, m1 | m2));
      }
    }
  }
}

TEST_CASE("reachable_set examples") {
  const auto loops = DirectedGraph::empty(3).with_self_loops();
  const std::array<DirectedGraph, 3> only_loops{loops, loops, loops};
  CHECK(reachable_set(only_loops, 0, 0, 2) == std::vector<NodeId>{0});

  const std::array<DirectedGraph, 2> edge_then_loop{DirectedGraph(3, {{0, 1}}).with_self_loops(), loops};
  CHECK(reachable_set(edge_then_loop, 0, 0, 1) == std::vector<NodeId>{0, 1});

  const std::array<DirectedGraph, 2> chain{DirectedGraph(3, {{0, 1}}).with_self_loops(),
                                           DirectedGraph(3, {{1, 2}}).with_self_loops()};
  CHECK(reachable_set(chain, 0, 0, 1) == std::vector<NodeId>{0, 1, 2});
  // The order matters: 1 -> 2 first, then 0 -> 1 reaches only node 1.
  const std::array<DirectedGraph, 2> reversed{chain[1], chain[0]};
  CHECK(reachable_set(reversed, 0, 0, 1) == std::vector<NodeId>{0, 1});

  CHECK_THROWS_AS(reachable_set(chain, 3, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(reachable_set(chain, 0, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(reachable_set(chain, 0, 0, 2), InvalidArgument);
}

TEST_CASE("reachable_set matches boolean matrix products and grows with the window") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    std::vector<DirectedGraph> gs;
    for (int k = 0; k < 6; ++k) gs.push_back(testutil::random_graph(rng, n, 0.2, true));
    const int origin = static_cast<int>(rng() % static_cast<unsigned>(n));
    std::vector<bool> reach(static_cast<std::size_t>(n));
    reach[static_cast<std::size_t>(origin)] = true;
    std::vector<NodeId> previous;
    for (int k2 = 0; k2 < 6; ++k2) {
      std::vector<bool> next(static_cast<std::size_t>(n));
      for (const Edge& e : gs[static_cast<std::size_t>(k2)].edges()) {
        if (reach[static_cast<std::size_t>(e.from)]) next[static_cast<std::size_t>(e.to)] = true;
      }
      reach = next;
      std::vector<NodeId> expected;
      for (int i = 0; i < n; ++i) {
        if (reach[static_cast<std::size_t>(i)]) expected.push_back(i);
      }
      const auto got = reachable_set(gs, origin, 0, k2);
      REQUIRE(got == expected);
      CHECK(std::includes(got.begin(), got.end(), previous.begin(), previous.end()));
      previous = got;
    }
  }
}

TEST_CASE("graph_of_matrix uses the transpose convention and keeps entries equal to alpha") {
  const auto id = graph_of_matrix(DenseMatrix::identity(3), 0.0);
  CHECK(id == DirectedGraph::empty(3).with_self_loops());

  DenseMatrix a(2, 2);
  a(1, 0) = 0.4;
  CHECK_FALSE(graph_of_matrix(a, 0.5).has_edge(0, 1));
  a(1, 0) = 0.6;
  CHECK(graph_of_matrix(a, 0.5).has_edge(0, 1));
  CHECK_FALSE(graph_of_matrix(a, 0.5).has_edge(1, 0));
  a(1, 0) = 0.5;
  CHECK(graph_of_matrix(a, 0.5).has_edge(0, 1));
  a(0, 1) = -0.1;
  CHECK_THROWS_AS(graph_of_matrix(a, 0.0), InvalidArgument);
}
