#include "pushsum/consensus.hpp"

#include <string>

#include "pushsum/error.hpp"
#include "pushsum/oracle.hpp"

namespace pushsum {
namespace {

void require_self_loops(const DirectedGraph& g, const char* who) {
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (!g.has_self_loop(i)) {
      throw InvalidArgument(std::string(who) + ": node " + std::to_string(i) +
                            " has no self-loop");
    }
  }
}

}  // namespace

std::vector<double> ordinary_step(const DenseMatrix& a, std::span<const double> x) {
  if (!a.is_square() || a.cols() != x.size()) {
    throw InvalidArgument("ordinary_step: dimension mismatch");
  }
  if (!check_stochastic(a, Stochasticity::row)) {
    throw InvalidArgument("ordinary_step: matrix is not row stochastic");
  }
  return multiply(a, x);
}

DenseMatrix equal_weight_matrix(const DirectedGraph& g) {
  require_self_loops(g, "equal_weight_matrix");
  const auto n = static_cast<std::size_t>(g.node_count());
  DenseMatrix a(n, n);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto in = g.in_neighbors(i);
    const double w = 1.0 / static_cast<double>(in.size());
    for (NodeId j : in) a(i, j) = w;
  }
  return a;
}

DenseMatrix uniform_symmetric_matrix(const DirectedGraph& g) {
  require_self_loops(g, "uniform_symmetric_matrix");
  if (!g.is_symmetric()) throw InvalidArgument("uniform_symmetric_matrix: graph is not symmetric");
  const auto n = static_cast<std::size_t>(g.node_count());
  const double w = 1.0 / static_cast<double>(n);
  DenseMatrix a(n, n);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    int degree = 0;
    for (NodeId j : g.out_neighbors(i)) {
      if (j == i) continue;
      a(i, j) = w;
      ++degree;
    }
    a(i, i) = 1.0 - degree * w;
  }
  return a;
}

DenseMatrix build_pushsum_matrix(const DirectedGraph& g) {
  require_self_loops(g, "build_pushsum_matrix");
  const auto n = static_cast<std::size_t>(g.node_count());
  DenseMatrix w(n, n);
  for (const Edge& e : g.edges()) {
    w(e.to, e.from) = 1.0 / static_cast<double>(g.out_degree(e.from));
  }
  return w;
}

PushSumState push_sum_step(const DirectedGraph& g, std::span<const double> x,
                           std::span<const double> y) {
  require_self_loops(g, "push_sum_step");
  const auto n = static_cast<std::size_t>(g.node_count());
  if (x.size() != n || y.size() != n) throw InvalidArgument("push_sum_step: dimension mismatch");
  for (double v : y) {
    if (!(v > 0.0)) throw InvalidArgument("push_sum_step: y must be positive");
  }

  PushSumState next{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                    std::vector<double>(n, 0.0)};
  for (NodeId j = 0; j < g.node_count(); ++j) {
    const double d = static_cast<double>(g.out_degree(j));
    const double share_x = x[j] / d;
    const double share_y = y[j] / d;
    for (NodeId i : g.out_neighbors(j)) {
      next.x[i] += share_x;
      next.y[i] += share_y;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (next.y[i] == 0.0) {
      throw InvariantViolation("push_sum_step: node " + std::to_string(i) + " has zero weight");
    }
    next.z[i] = next.x[i] / next.y[i];
  }
  return next;
}

}  // namespace pushsum
