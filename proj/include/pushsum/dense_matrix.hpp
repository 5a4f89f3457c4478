#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pushsum {

// Small dense row-major matrix of doubles. Sized for the oracle: a few
// dozen rows at most, so storage is a single contiguous vector.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Rectangular sub-block [r0, r0+rows) x [c0, c0+cols).
  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t rows,
                    std::size_t cols) const;

  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;

  double min_entry() const;
  // Smallest strictly positive entry, or 0 if there is none.
  double min_positive_entry() const;
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A * B. Throws InvalidArgument on a dimension mismatch.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

// A * x.
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);

// Largest absolute entrywise difference; matrices must have equal shape.
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace pushsum
