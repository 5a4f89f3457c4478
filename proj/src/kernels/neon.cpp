#include "pushsum/kernels.hpp"

#if defined(PUSHSUM_HAVE_NEON_KERNELS)

#include <arm_neon.h>

namespace pushsum::kernels::neon {
namespace {

double dot_raw(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_raw(double s, const double* x, double* y, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vs, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += s * x[i];
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  return dot_raw(a.data(), b.data(), a.size());
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot_raw(a.data() + r * cols, x.data(), cols);
  }
}

void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* c_row = c.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) c_row[j] = 0.0;
    for (std::size_t p = 0; p < inner; ++p) {
      axpy_raw(a[i * inner + p], b.data() + p * cols, c_row, cols);
    }
  }
}

void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    axpy_raw(1.0, a.data() + i * cols, out.data(), cols);
  }
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  axpy_raw(s, x.data(), y.data(), x.size());
}

}  // namespace pushsum::kernels::neon

#endif
