#include "pushsum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pushsum/error.hpp"

namespace pushsum {

DenseMatrix threshold(const DenseMatrix& a, double alpha) {
  DenseMatrix out = a;
  for (double& v : out.data()) {
    if (v < alpha) v = 0.0;
  }
  return out;
}

DenseMatrix product_range(const MatrixSource& source, int k1, int k2) {
  if (k1 > k2) {
    throw InvalidArgument("product_range: empty range [" + std::to_string(k1) + ", " +
                          std::to_string(k2) + "]");
  }
  DenseMatrix acc = source(k1);
  if (!acc.is_square()) throw InvalidArgument("product_range needs square matrices");
  for (int k = k1 + 1; k <= k2; ++k) {
    DenseMatrix next = source(k);
    if (next.rows() != acc.rows() || next.cols() != acc.cols()) {
      throw InvalidArgument("product_range: dimension mismatch at index " + std::to_string(k));
    }
    acc = multiply(next, acc);
  }
  return acc;
}

DenseMatrix product_range(std::span<const DenseMatrix> sequence, int k1, int k2) {
  if (k1 <= k2 && (k1 < 0 || static_cast<std::size_t>(k2) >= sequence.size())) {
    throw InvalidArgument("product_range: range outside the sequence");
  }
  return product_range([&](int k) { return sequence[static_cast<std::size_t>(k)]; }, k1, k2);
}

bool check_stochastic(const DenseMatrix& a, Stochasticity mode, double tol) {
  if (!a.is_square()) throw InvalidArgument("check_stochastic needs a square matrix");
  if (a.min_entry() < -tol) return false;
  const auto sums = mode == Stochasticity::row ? a.row_sums() : a.column_sums();
  return std::all_of(sums.begin(), sums.end(),
                     [tol](double s) { return std::abs(s - 1.0) <= tol; });
}

double spread(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("spread of an empty vector");
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

PositivityReport verify_block_positivity(const MatrixSource& source, int mu_l,
                                         int mu_ln, double alpha,
                                         std::optional<std::size_t> leading_rows) {
  if (mu_ln <= mu_l) {
    throw InvalidArgument("verify_block_positivity: window [" + std::to_string(mu_l) +
                          ", " + std::to_string(mu_ln) + ") is empty");
  }
  const DenseMatrix product = product_range(source, mu_l, mu_ln - 1);
  const std::size_t rows = std::min(leading_rows.value_or(product.rows()), product.rows());

  PositivityReport report;
  report.bound = std::pow(alpha, mu_ln - mu_l);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    for (double v : product.row(r)) lo = std::min(lo, v);
  }
  report.min_entry = rows == 0 ? 0.0 : lo;
  report.strictly_positive = rows > 0 && lo > 0.0;
  report.meets_bound = report.min_entry >= report.bound;
  return report;
}

ContractionReport contraction_check(const DenseMatrix& a, std::span<const double> u,
                                    double beta, double slack) {
  if (beta <= 0.0) throw InvalidArgument("contraction_check needs beta > 0");
  if (!a.is_square() || a.cols() != u.size()) {
    throw InvalidArgument("contraction_check: dimension mismatch");
  }
  if (a.min_entry() < beta) {
    throw InvalidArgument("contraction_check: matrix has an entry below beta");
  }
  const auto n = static_cast<double>(a.rows());
  const std::vector<double> v = multiply(a, u);

  ContractionReport report;
  report.spread_before = spread(u);
  report.spread_after = spread(v);
  report.bound = (1.0 - n * beta) * report.spread_before;
  report.contraction_holds = report.spread_after <= report.bound + slack;

  auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  report.convex_hull_holds = std::all_of(v.begin(), v.end(), [&](double x) {
    return x >= *lo - slack && x <= *hi + slack;
  });
  return report;
}

std::vector<double> partial_products(const std::function<double(int)>& alpha_k,
                                     int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  double acc = 1.0;
  for (int k = 1; k <= count; ++k) {
    acc *= 1.0 - alpha_k(k);
    out.push_back(acc);
  }
  return out;
}

}  // namespace pushsum
