#pragma once

// Ordinary linear consensus x <- A x and synchronous push-sum over
// time-varying graphs with self-loops.

#include <span>
#include <vector>

#include "pushsum/dense_matrix.hpp"
#include "pushsum/graph.hpp"

namespace pushsum {

// A x for a row-stochastic A (checked within 1e-12).
std::vector<double> ordinary_step(const DenseMatrix& a, std::span<const double> x);

// Row i weighs each in-neighbor (self included) by 1 / d_i^-. Positive
// entries are at least 1/n. Throws if some node lacks a self-loop.
DenseMatrix equal_weight_matrix(const DirectedGraph& g);

// Symmetric doubly stochastic weights on a symmetric graph with self-loops:
// A(i, j) = 1/n per link, A(i, i) = 1 - (degree of i) / n. Every positive
// entry is at least 1/n. Preserves the sum of the state.
DenseMatrix uniform_symmetric_matrix(const DirectedGraph& g);

// W(i, j) = 1 / d_j^+ when (j, i) is an edge. Column stochastic; positive
// entries are at least 1/n. Throws if some node lacks a self-loop.
DenseMatrix build_pushsum_matrix(const DirectedGraph& g);

struct PushSumState {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
};

// One push-sum iteration: every node splits x and y evenly over its
// out-neighbors (self included) and sums what it receives.
// Throws InvalidArgument if y has a non-positive entry on input and
// InvariantViolation if some node ends with y = 0.
PushSumState push_sum_step(const DirectedGraph& g, std::span<const double> x,
                           std::span<const double> y);

}  // namespace pushsum
