#include "cpf/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace cpf::simd {

#if defined(CPF_HAVE_AVX2)
const Kernels& avx2_kernel_table();
#endif

bool avx2_supported() {
#if defined(CPF_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend resolve() {
  const char* env = std::getenv("CPF_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    // "auto" or anything unrecognized falls through to detection
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = resolve();
  return b;
}

const char* backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

const Kernels& kernels() {
#if defined(CPF_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2_kernel_table();
#endif
  return scalar_kernels();
}

}  // namespace cpf::simd
