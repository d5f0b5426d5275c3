#pragma once

#include <cstddef>

#include "rsbarrier/aligned.hpp"

namespace rsb::simd {

// Data-parallel kernels over interleaved complex arrays. Each variant performs
// the same IEEE operations in the same order (no FMA contraction), so the
// scalar and AVX2 tables give bit-identical results.
struct Kernels {
  const char* name;
  // out[k] = a[k] * b[k]
  void (*cmul)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
  // y[k] += alpha * x[k]
  void (*caxpy)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
  // y[k] *= s
  void (*scale_real)(cplx* y, double s, std::size_t n);
  // y[k] = alpha * y[k] + x[k]
  void (*cscale_add)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
  // max_k |a[k] - b[k]|^2
  double (*max_abs2_diff)(const cplx* a, const cplx* b, std::size_t n);
  // min_k Re(a[k] - b[k])
  double (*min_real_diff)(const cplx* a, const cplx* b, std::size_t n);
};

const Kernels& scalar_kernels();
// AVX2 table; falls back to the scalar table when the CPU lacks AVX2.
const Kernels& avx2_kernels();
bool cpu_has_avx2();
// Selected once at startup: AVX2 when supported unless RSB_SIMD=scalar.
const Kernels& kernels();

}  // namespace rsb::simd
