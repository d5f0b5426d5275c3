#include <cstdlib>
#include <cstring>

#include "rsbarrier/simd.hpp"

namespace rsb::simd {

const Kernels* avx2_table();

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels& avx2_kernels() {
  const Kernels* t = avx2_table();
  if (t && cpu_has_avx2()) return *t;
  return scalar_kernels();
}

const Kernels& kernels() {
  static const Kernels* selected = [] {
    const char* env = std::getenv("RSB_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    return &avx2_kernels();
  }();
  return *selected;
}

}  // namespace rsb::simd
