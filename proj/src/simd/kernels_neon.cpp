#include "atr/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace atr::simd::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_neon(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += x[i];
}

void max_neon(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmaxq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void blend4_neon(const double* p0, const double* p1, const double* p2, const double* p3,
                 const double* w, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vmulq_n_f64(vld1q_f64(p0 + i), w[0]);
    r = vfmaq_n_f64(r, vld1q_f64(p1 + i), w[1]);
    r = vfmaq_n_f64(r, vld1q_f64(p2 + i), w[2]);
    r = vfmaq_n_f64(r, vld1q_f64(p3 + i), w[3]);
    vst1q_f64(out + i, r);
  }
  for (; i < n; ++i) out[i] = w[0] * p0[i] + w[1] * p1[i] + w[2] * p2[i] + w[3] * p3[i];
}

const KernelTable kNeonTable{Level::Neon, dot_neon, axpy_neon, add_neon, max_neon, blend4_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeonTable; }

}  // namespace atr::simd::detail

#else

namespace atr::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace atr::simd::detail

#endif
