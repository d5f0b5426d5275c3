#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "rsbarrier/simd.hpp"

namespace rsb::simd {

#if defined(__AVX2__)

namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// [ar, ai] * [br, bi] for two complex numbers per register, same operation
// order as the scalar kernel: (ar*br - ai*bi, ai*br + ar*bi).
inline __m256d mul2(__m256d a, __m256d b) {
  __m256d br = _mm256_movedup_pd(b);          // br br
  __m256d bi = _mm256_permute_pd(b, 0xF);     // bi bi
  __m256d as = _mm256_permute_pd(a, 0x5);     // ai ar
  __m256d t1 = _mm256_mul_pd(a, br);          // ar*br ai*br
  __m256d t2 = _mm256_mul_pd(as, bi);         // ai*bi ar*bi
  return _mm256_addsub_pd(t1, t2);
}

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  const double* x = dp(a);
  const double* y = dp(b);
  double* o = dp(out);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d va = _mm256_loadu_pd(x + 2 * k);
    __m256d vb = _mm256_loadu_pd(y + 2 * k);
    _mm256_storeu_pd(o + 2 * k, mul2(va, vb));
  }
  if (k < n) scalar_kernels().cmul(out + k, a + k, b + k, n - k);
}

void caxpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double* xs = dp(x);
  double* ys = dp(y);
  __m256d va = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d vx = _mm256_loadu_pd(xs + 2 * k);
    __m256d vy = _mm256_loadu_pd(ys + 2 * k);
    _mm256_storeu_pd(ys + 2 * k, _mm256_add_pd(vy, mul2(vx, va)));
  }
  if (k < n) scalar_kernels().caxpy(y + k, alpha, x + k, n - k);
}

void scale_real(cplx* y, double s, std::size_t n) {
  double* ys = dp(y);
  __m256d vs = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    _mm256_storeu_pd(ys + 2 * k, _mm256_mul_pd(_mm256_loadu_pd(ys + 2 * k), vs));
  }
  if (k < n) scalar_kernels().scale_real(y + k, s, n - k);
}

void cscale_add(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double* xs = dp(x);
  double* ys = dp(y);
  __m256d va = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d vy = _mm256_loadu_pd(ys + 2 * k);
    __m256d vx = _mm256_loadu_pd(xs + 2 * k);
    _mm256_storeu_pd(ys + 2 * k, _mm256_add_pd(mul2(vy, va), vx));
  }
  if (k < n) scalar_kernels().cscale_add(y + k, alpha, x + k, n - k);
}

double max_abs2_diff(const cplx* a, const cplx* b, std::size_t n) {
  const double* x = dp(a);
  const double* y = dp(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + 2 * k), _mm256_loadu_pd(y + 2 * k));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + 2 * k + 4), _mm256_loadu_pd(y + 2 * k + 4));
    __m256d s = _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
    s = _mm256_permute4x64_pd(s, 0xD8);  // m0 m1 m2 m3
    acc = _mm256_max_pd(s, acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; k < n; ++k) {
    double dr = x[2 * k] - y[2 * k];
    double di = x[2 * k + 1] - y[2 * k + 1];
    double m = dr * dr + di * di;
    double& l = lane[k & 3];
    l = std::max(l, m);
  }
  return std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
}

double min_real_diff(const cplx* a, const cplx* b, std::size_t n) {
  const double* x = dp(a);
  const double* y = dp(b);
  __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + 2 * k), _mm256_loadu_pd(y + 2 * k));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + 2 * k + 4), _mm256_loadu_pd(y + 2 * k + 4));
    __m256d r = _mm256_unpacklo_pd(d0, d1);  // d0 d2 d1 d3
    r = _mm256_permute4x64_pd(r, 0xD8);
    acc = _mm256_min_pd(r, acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; k < n; ++k) {
    double d = x[2 * k] - y[2 * k];
    double& l = lane[k & 3];
    l = std::min(l, d);
  }
  return std::min(std::min(lane[0], lane[1]), std::min(lane[2], lane[3]));
}

const Kernels table{"avx2", cmul, caxpy, scale_real, cscale_add, max_abs2_diff, min_real_diff};

}  // namespace

const Kernels* avx2_table() { return &table; }

#else

const Kernels* avx2_table() { return nullptr; }

#endif

}  // namespace rsb::simd
