#pragma once

// Dense double-precision kernels behind DenseMatrix arithmetic.
//
// Every kernel has a portable scalar reference in kernels::scalar and, where
// the target supports it, an AVX2 (x86-64) or NEON (AArch64) variant. The
// public entry points dispatch once, at first use, to the best variant the
// running CPU supports. PUSHSUM_ISA=scalar|avx2|neon in the environment, or
// force_isa() from code, pins a specific variant.
//
// All matrices are dense row-major. No variant uses fused multiply-add, so
// matmul/axpy agree bit-for-bit with the scalar reference; reductions (dot,
// matvec, column_sums) use a different summation order and agree to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace pushsum::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// True when this binary was built with the variant and the CPU can run it.
bool isa_available(Isa isa);

Isa active_isa();

// Pins the dispatch target. Throws InvalidArgument if the variant is not
// available on this machine.
void force_isa(Isa isa);

// Drops any pin and re-runs detection (including the environment variable).
void reset_isa();

// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

// y = A x, with A rows x cols.
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

// C = A B, with A rows x inner, B inner x cols. C is overwritten.
void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols);

// out[j] = sum_i A(i, j)
void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out);

// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols);
void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out);
void axpy(double s, std::span<const double> x, std::span<double> y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define PUSHSUM_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols);
void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out);
void axpy(double s, std::span<const double> x, std::span<double> y);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define PUSHSUM_HAVE_NEON_KERNELS 1
namespace neon {
double dot(std::span<const double> a, std::span<const double> b);
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols);
void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out);
void axpy(double s, std::span<const double> x, std::span<double> y);
}  // namespace neon
#endif

}  // namespace pushsum::kernels
