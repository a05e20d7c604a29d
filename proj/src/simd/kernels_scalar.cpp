#include "cpf/simd.hpp"

#include <cmath>

namespace cpf::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void sq_dist_accum_scalar(const double* x, double c, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - c;
    acc[i] += d * d;
  }
}

void exp_scale_scalar(const double* x, double scale, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(scale * x[i]);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {dot_scalar, dot3_scalar,     sum_scalar,
                            axpy_scalar, sq_dist_accum_scalar, exp_scale_scalar};
  return k;
}

}  // namespace cpf::simd
