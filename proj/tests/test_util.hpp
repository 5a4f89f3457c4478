#pragma once

#include <random>
#include <vector>

#include "pushsum/dense_matrix.hpp"
#include "pushsum/graph.hpp"

namespace testutil {

// Edge subset `mask` over all n*n ordered pairs (self-loops included),
// bit (i*n + j) for edge i -> j.
inline pushsum::DirectedGraph graph_from_mask(int n, unsigned mask) {
  std::vector<pushsum::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << (i * n + j))) edges.push_back({i, j});
    }
  }
  return pushsum::DirectedGraph(n, std::move(edges));
}

inline pushsum::DirectedGraph random_graph(std::mt19937_64& rng, int n, double p, bool loops) {
  std::bernoulli_distribution coin(p);
  std::vector<pushsum::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j ? loops : coin(rng)) edges.push_back({i, j});
    }
  }
  return pushsum::DirectedGraph(n, std::move(edges));
}

// Strongly connected: a random ring order plus random extra links.
inline pushsum::DirectedGraph random_connected(std::mt19937_64& rng, int n, double p, bool loops) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(p);
  std::vector<pushsum::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        if (loops) edges.push_back({i, j});
        continue;
      }
      bool ring = false;
      for (int k = 0; k < n; ++k) {
        if (order[static_cast<std::size_t>(k)] == i && order[static_cast<std::size_t>((k + 1) % n)] == j) ring = true;
      }
      if (ring || coin(rng)) edges.push_back({i, j});
    }
  }
  return pushsum::DirectedGraph(n, std::move(edges));
}

// Row-stochastic matrix with every entry at least `floor`.
inline pushsum::DenseMatrix random_row_stochastic(std::mt19937_64& rng, std::size_t n, double floor) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pushsum::DenseMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& e : w) total += (e = u(rng));
    const double free = 1.0 - floor * static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) a(r, c) = floor + free * w[c] / total;
  }
  return a;
}

inline pushsum::DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  pushsum::DenseMatrix a(rows, cols);
  for (auto& e : a.data()) e = u(rng);
  return a;
}

}  // namespace testutil
