#include <atomic>
#include <cstdlib>
#include <string>

#include "pushsum/error.hpp"
#include "pushsum/kernels.hpp"

namespace pushsum::kernels {
namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*matvec)(std::span<const double>, std::size_t, std::size_t,
                 std::span<const double>, std::span<double>);
  void (*matmul)(std::span<const double>, std::span<const double>,
                 std::span<double>, std::size_t, std::size_t, std::size_t);
  void (*column_sums)(std::span<const double>, std::size_t, std::size_t,
                      std::span<double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
};

constexpr KernelTable kScalar{Isa::scalar, scalar::dot, scalar::matvec,
                              scalar::matmul, scalar::column_sums,
                              scalar::axpy};
#if defined(PUSHSUM_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, avx2::dot, avx2::matvec, avx2::matmul,
                            avx2::column_sums, avx2::axpy};
#endif
#if defined(PUSHSUM_HAVE_NEON_KERNELS)
constexpr KernelTable kNeon{Isa::neon, neon::dot, neon::matvec, neon::matmul,
                            neon::column_sums, neon::axpy};
#endif

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(PUSHSUM_HAVE_AVX2_KERNELS)
    case Isa::avx2:
      return kAvx2;
#endif
#if defined(PUSHSUM_HAVE_NEON_KERNELS)
    case Isa::neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

Isa parse_isa(std::string_view name, Isa fallback) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return fallback;
}

Isa detect() {
  Isa best = Isa::scalar;
  if (isa_available(Isa::avx2)) best = Isa::avx2;
  if (isa_available(Isa::neon)) best = Isa::neon;
  if (const char* env = std::getenv("PUSHSUM_ISA")) {
    Isa wanted = parse_isa(env, best);
    if (isa_available(wanted)) best = wanted;
  }
  return best;
}

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable& active() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    table = &table_for(detect());
    g_active.store(table, std::memory_order_release);
  }
  return *table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PUSHSUM_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(PUSHSUM_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return active().isa; }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidArgument("kernel variant not available: " + std::string(isa_name(isa)));
  }
  g_active.store(&table_for(isa), std::memory_order_release);
}

void reset_isa() {
  g_active.store(nullptr, std::memory_order_release);
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("kernel shape mismatch: ") + what);
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot");
  return active().dot(a, b);
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  require(a.size() == rows * cols && x.size() == cols && y.size() == rows, "matvec");
  active().matvec(a, rows, cols, x, y);
}

void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> c, std::size_t rows, std::size_t inner,
            std::size_t cols) {
  require(a.size() == rows * inner && b.size() == inner * cols && c.size() == rows * cols, "matmul");
  active().matmul(a, b, c, rows, inner, cols);
}

void column_sums(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<double> out) {
  require(a.size() == rows * cols && out.size() == cols, "column_sums");
  active().column_sums(a, rows, cols, out);
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy");
  active().axpy(s, x, y);
}

}  // namespace pushsum::kernels
