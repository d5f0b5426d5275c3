#include <algorithm>
#include <limits>

#include "rsbarrier/simd.hpp"

namespace rsb::simd {

namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  const double* x = dp(a);
  const double* y = dp(b);
  double* o = dp(out);
  for (std::size_t k = 0; k < n; ++k) {
    double ar = x[2 * k], ai = x[2 * k + 1], br = y[2 * k], bi = y[2 * k + 1];
    double rr = ar * br;
    double ii = ai * bi;
    double ri = ai * br;
    double ir = ar * bi;
    o[2 * k] = rr - ii;
    o[2 * k + 1] = ri + ir;
  }
}

void caxpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double* xs = dp(x);
  double* ys = dp(y);
  double cr = alpha.real(), ci = alpha.imag();
  for (std::size_t k = 0; k < n; ++k) {
    double xr = xs[2 * k], xi = xs[2 * k + 1];
    double rr = xr * cr;
    double ii = xi * ci;
    double ri = xi * cr;
    double ir = xr * ci;
    ys[2 * k] += rr - ii;
    ys[2 * k + 1] += ri + ir;
  }
}

void scale_real(cplx* y, double s, std::size_t n) {
  double* ys = dp(y);
  for (std::size_t k = 0; k < 2 * n; ++k) ys[k] *= s;
}

void cscale_add(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double* xs = dp(x);
  double* ys = dp(y);
  double cr = alpha.real(), ci = alpha.imag();
  for (std::size_t k = 0; k < n; ++k) {
    double yr = ys[2 * k], yi = ys[2 * k + 1];
    double rr = yr * cr;
    double ii = yi * ci;
    double ri = yi * cr;
    double ir = yr * ci;
    ys[2 * k] = (rr - ii) + xs[2 * k];
    ys[2 * k + 1] = (ri + ir) + xs[2 * k + 1];
  }
}

// Reductions use four interleaved lanes so the AVX2 variant can reproduce the
// exact same combination order.
double max_abs2_diff(const cplx* a, const cplx* b, std::size_t n) {
  const double* x = dp(a);
  const double* y = dp(b);
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
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
  double lane[4];
  std::fill(lane, lane + 4, std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < n; ++k) {
    double d = x[2 * k] - y[2 * k];
    double& l = lane[k & 3];
    l = std::min(l, d);
  }
  return std::min(std::min(lane[0], lane[1]), std::min(lane[2], lane[3]));
}

const Kernels table{"scalar", cmul, caxpy, scale_real, cscale_add, max_abs2_diff, min_real_diff};

}  // namespace

const Kernels& scalar_kernels() { return table; }

}  // namespace rsb::simd
