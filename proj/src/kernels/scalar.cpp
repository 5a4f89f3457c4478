#include "pushsum/kernels.hpp"

namespace pushsum::kernels::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot(a.subspan(r * cols, cols), x);
  }
}

// i-p-j order: each output row is accumulated as a sequence of axpy updates.
// The vector variants keep this order so the results are bit-identical.
void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    auto c_row = c.subspan(i * cols, cols);
    for (auto& v : c_row) v = 0.0;
    for (std::size_t p = 0; p < inner; ++p) {
      axpy(a[i * inner + p], b.subspan(p * cols, cols), c_row);
    }
  }
}

void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j] += a[i * cols + j];
  }
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

}  // namespace pushsum::kernels::scalar
