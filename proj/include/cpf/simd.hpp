#pragma once

#include <cstddef>

// Vectorized inner-loop kernels with runtime dispatch.
//
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant.  The active set is resolved once at first
// use from CPUID, overridable with the environment variable
// CPF_SIMD=scalar|avx2|auto.  Scalar and vector variants are equivalence
// tested against each other; everything above this layer is backend-agnostic.

namespace cpf::simd {

enum class Backend { scalar, avx2 };

struct Kernels {
  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]*b[i]*c[i]
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // acc[i] += (x[i] - c)^2   (one dimension of a squared-distance row)
  void (*sq_dist_accum)(const double* x, double c, double* acc, std::size_t n);
  // out[i] = exp(scale * x[i])
  void (*exp_scale)(const double* x, double scale, double* out, std::size_t n);
};

// Kernel set for the backend selected at runtime.
const Kernels& kernels();

// Scalar reference set, always available (used by equivalence tests).
const Kernels& scalar_kernels();

Backend active_backend();
const char* backend_name();

// True if this CPU can run the AVX2 variants at all.
bool avx2_supported();

}  // namespace cpf::simd
