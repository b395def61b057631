#pragma once

// Data-parallel inner loops used by the classifiers, the RCS lookup and the
// fusion rules. Every kernel has a scalar reference implementation; AVX2+FMA
// (x86-64) and NEON (aarch64) variants are selected once at runtime.
//
// The environment variable ATR_SIMD=scalar|avx2|neon forces a level.

#include <cstddef>
#include <span>
#include <string_view>

namespace atr::simd {

enum class Level { Scalar, Avx2, Neon };

struct KernelTable {
  Level level;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y += x
  void (*add)(const double* x, double* y, std::size_t n);
  // y = max(y, x)
  void (*max)(const double* x, double* y, std::size_t n);
  // out = w[0]*p0 + w[1]*p1 + w[2]*p2 + w[3]*p3
  void (*blend4)(const double* p0, const double* p1, const double* p2, const double* p3,
                 const double* w, double* out, std::size_t n);
};

bool supported(Level level);
std::string_view name(Level level);

/// Table for a specific level; throws atr::ConfigError when the CPU lacks it.
const KernelTable& table(Level level);

/// Table chosen at first use: best supported level unless overridden by ATR_SIMD.
const KernelTable& active();

namespace detail {
extern const KernelTable kScalarTable;
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void add(std::span<const double> x, std::span<double> y) {
  active().add(x.data(), y.data(), x.size());
}
inline void max(std::span<const double> x, std::span<double> y) {
  active().max(x.data(), y.data(), x.size());
}

}  // namespace atr::simd
