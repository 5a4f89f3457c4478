#pragma once

// Reference matrix machinery used to certify simulator runs: thresholding,
// ordered products A^{k2} ... A^{k1}, stochasticity checks, the spread
// functional, block positivity and the contraction inequality.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pushsum/dense_matrix.hpp"

namespace pushsum {

// Matrix for iteration k. Sources may compute matrices lazily.
using MatrixSource = std::function<DenseMatrix(int k)>;

inline constexpr double kStochasticTol = 1e-12;

// Entries strictly below alpha become 0.
DenseMatrix threshold(const DenseMatrix& a, double alpha);

// A^{k2} A^{k2-1} ... A^{k1}. Evaluated as a left fold starting at k1.
// Throws InvalidArgument when k1 > k2 or shapes disagree.
DenseMatrix product_range(const MatrixSource& source, int k1, int k2);
DenseMatrix product_range(std::span<const DenseMatrix> sequence, int k1, int k2);

enum class Stochasticity { row, column };

// Non-negative (down to -tol) with every row (column) summing to 1 within tol.
bool check_stochastic(const DenseMatrix& a, Stochasticity mode,
                      double tol = kStochasticTol);

// max(v) - min(v). Throws InvalidArgument on an empty vector.
double spread(std::span<const double> v);

struct PositivityReport {
  bool strictly_positive = false;  // every inspected entry > 0
  double min_entry = 0.0;          // over the inspected rows
  double bound = 0.0;              // alpha^(mu_ln - mu_l)
  bool meets_bound = false;        // min_entry >= bound
};

// Inspects P = A^{mu_ln - 1 : mu_l}. `leading_rows` restricts the check to
// the first rows of P (the agent rows of a buffer-augmented product); the
// default inspects the whole matrix. Throws when mu_ln <= mu_l.
PositivityReport verify_block_positivity(const MatrixSource& source, int mu_l,
                                         int mu_ln, double alpha,
                                         std::optional<std::size_t> leading_rows = {});

struct ContractionReport {
  double spread_before = 0.0;
  double spread_after = 0.0;
  double bound = 0.0;           // (1 - n beta) * spread_before
  bool contraction_holds = false;
  bool convex_hull_holds = false;  // min(u) <= (Au)_i <= max(u)
};

// Checks spread(A u) <= (1 - n beta) spread(u) and that A u stays inside
// [min u, max u]. `slack` absorbs rounding. Throws InvalidArgument when an
// entry of A is below beta or beta <= 0.
ContractionReport contraction_check(const DenseMatrix& a, std::span<const double> u,
                                    double beta, double slack = 1e-12);

// Partial products prod_{k=1}^{K} (1 - alpha_k) for K = 1..count.
std::vector<double> partial_products(const std::function<double(int)>& alpha_k,
                                     int count);

}  // namespace pushsum
