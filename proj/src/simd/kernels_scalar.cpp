#include "atr/simd/kernels.hpp"

namespace atr::simd::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

void max_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void blend4_scalar(const double* p0, const double* p1, const double* p2, const double* p3,
                   const double* w, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = w[0] * p0[i] + w[1] * p1[i] + w[2] * p2[i] + w[3] * p3[i];
  }
}

}  // namespace

const KernelTable kScalarTable{Level::Scalar, dot_scalar, axpy_scalar, add_scalar, max_scalar,
                               blend4_scalar};

}  // namespace atr::simd::detail
