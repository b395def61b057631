// Compiled with -mavx2 -mfma; only entered after a runtime CPU check.
#include "atr/simd/kernels.hpp"

#if defined(ATR_HAVE_AVX2)
#include <immintrin.h>

namespace atr::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] += x[i];
}

void max_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void blend4_avx2(const double* p0, const double* p1, const double* p2, const double* p3,
                 const double* w, double* out, std::size_t n) {
  const __m256d w0 = _mm256_set1_pd(w[0]);
  const __m256d w1 = _mm256_set1_pd(w[1]);
  const __m256d w2 = _mm256_set1_pd(w[2]);
  const __m256d w3 = _mm256_set1_pd(w[3]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(w0, _mm256_loadu_pd(p0 + i));
    r = _mm256_fmadd_pd(w1, _mm256_loadu_pd(p1 + i), r);
    r = _mm256_fmadd_pd(w2, _mm256_loadu_pd(p2 + i), r);
    r = _mm256_fmadd_pd(w3, _mm256_loadu_pd(p3 + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = w[0] * p0[i] + w[1] * p1[i] + w[2] * p2[i] + w[3] * p3[i];
}

const KernelTable kAvx2Table{Level::Avx2, dot_avx2, axpy_avx2, add_avx2, max_avx2, blend4_avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2Table; }

}  // namespace atr::simd::detail

#else

namespace atr::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace atr::simd::detail

#endif
