#include "pushsum/kernels.hpp"

#if defined(PUSHSUM_HAVE_AVX2_KERNELS)

#include <immintrin.h>

// Only the functions below are compiled for AVX2 (per-function target
// attribute); the rest of the binary stays at the baseline ISA.
#define PUSHSUM_AVX2 __attribute__((target("avx2")))

namespace pushsum::kernels::avx2 {
namespace {

PUSHSUM_AVX2 double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

PUSHSUM_AVX2 double dot_raw(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

PUSHSUM_AVX2 void axpy_raw(double s, const double* x, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
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

}  // namespace pushsum::kernels::avx2

#endif
