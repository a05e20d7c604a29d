// AVX2+FMA variants of the inner-loop kernels.  Compiled with -mavx2 -mfma;
// only reached when runtime CPUID reports support (see dispatch.cpp).

#include "cpf/simd.hpp"

#if defined(CPF_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace cpf::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void sq_dist_accum_avx2(const double* x, double c, double* acc, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    __m256d va = _mm256_fmadd_pd(d, d, _mm256_loadu_pd(acc + i));
    _mm256_storeu_pd(acc + i, va);
  }
  for (; i < n; ++i) {
    const double d = x[i] - c;
    acc[i] += d * d;
  }
}

// 4-wide exp, Cephes rational approximation.  exp(x) = 2^n * expm(r) with
// r = x - n*ln2 split in hi/lo parts; |rel err| stays within a few ulp of
// std::exp over the whole finite range, which the equivalence tests pin down.
inline __m256d exp_pd(__m256d x) {
  const __m256d maxlog = _mm256_set1_pd(7.09782712893383996843e2);
  const __m256d minlog = _mm256_set1_pd(-7.08396418532264106224e2);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  __m256d under = _mm256_cmp_pd(x, minlog, _CMP_LT_OQ);
  __m256d over = _mm256_cmp_pd(x, maxlog, _CMP_GT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, maxlog), minlog);

  __m256d nf = _mm256_floor_pd(_mm256_fmadd_pd(log2e, x, _mm256_set1_pd(0.5)));
  x = _mm256_fnmadd_pd(nf, c1, x);
  x = _mm256_fnmadd_pd(nf, c2, x);

  __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(p0, xx, p1);
  px = _mm256_fmadd_pd(px, xx, p2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(q0, xx, q1);
  qx = _mm256_fmadd_pd(qx, xx, q2);
  qx = _mm256_fmadd_pd(qx, xx, q3);
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^n applied in two halves so |half| <= 513 never overflows the scale factor
  __m256d nf1 = _mm256_floor_pd(_mm256_mul_pd(nf, _mm256_set1_pd(0.5)));
  __m256d nf2 = _mm256_sub_pd(nf, nf1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  __m256i e1 = _mm256_slli_epi64(
      _mm256_add_epi64(_mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(nf1)), bias), 52);
  __m256i e2 = _mm256_slli_epi64(
      _mm256_add_epi64(_mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(nf2)), bias), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(e1));
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(e2));

  r = _mm256_blendv_pd(r, _mm256_setzero_pd(), under);
  r = _mm256_blendv_pd(r, _mm256_set1_pd(HUGE_VAL), over);
  return r;
}

void exp_scale_avx2(const double* x, double scale, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, exp_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) out[i] = std::exp(scale * x[i]);
}

}  // namespace

const Kernels& avx2_kernel_table() {
  static const Kernels k = {dot_avx2, dot3_avx2,          sum_avx2,
                            axpy_avx2, sq_dist_accum_avx2, exp_scale_avx2};
  return k;
}

}  // namespace cpf::simd

#endif  // CPF_HAVE_AVX2
