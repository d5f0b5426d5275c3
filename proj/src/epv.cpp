#include "rsbarrier/epv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsbarrier/errors.hpp"
#include "rsbarrier/fft.hpp"
#include "rsbarrier/simd.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "epv_operators";

cplx cexpm1(cplx z) {
  double x = z.real(), y = z.imag();
  double s = std::sin(0.5 * y);
  return cplx(std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y));
}

double scale_of(const SampledFunction& u) {
  double s = std::max(std::abs(u.below), std::abs(u.above));
  for (const auto& v : u.residual) s = std::max(s, std::abs(v));
  return s;
}

double end_size(const CVector& r) {
  return std::max(std::abs(r.front()), std::abs(r.back()));
}

// End size seen through a two-point average. The inverse of a cell-mass
// kernel leaves an alternating grid-scale mode near the ends; the forward
// kernels damp it by their Nyquist symbol, so it is not a decay failure.
double smooth_end_size(const CVector& r) {
  std::size_t M = r.size();
  return 0.5 * std::max(std::abs(r[0] + r[1]), std::abs(r[M - 2] + r[M - 1]));
}

// 1 on [0, 1/2], 0 from 1 on, smooth in between.
double smooth_cutoff(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  double t = (1.0 - r) / 0.5;
  auto f = [](double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; };
  return f(t) / (f(t) + f(1.0 - t));
}

}  // namespace

CVector SampledFunction::values() const {
  CVector v(residual.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i);
  return v;
}

double SampledFunction::sup_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) s = std::max(s, std::abs(at(i)));
  return s;
}

SampledFunction SampledFunction::rebased(std::size_t new_ref) const {
  SampledFunction out = *this;
  out.ref = new_ref;
  cplx jump = above - below;
  if (jump != 0.0) {
    std::size_t lo = std::min(ref, new_ref), hi = std::max(ref, new_ref);
    // Rows in [lo, hi) change side of the step.
    cplx d = new_ref > ref ? jump : -jump;
    for (std::size_t i = lo; i < hi && i < out.residual.size(); ++i) out.residual[i] += d;
  }
  return out;
}

SampledFunction SampledFunction::zero(std::size_t M, std::size_t ref) {
  SampledFunction f;
  f.ref = ref;
  f.residual.assign(M, 0.0);
  return f;
}

SampledFunction SampledFunction::constant(std::size_t M, cplx c) {
  return step(M, 0, c, c);
}

SampledFunction SampledFunction::step(std::size_t M, std::size_t ref, cplx below, cplx above) {
  SampledFunction f = zero(M, ref);
  f.below = below;
  f.above = above;
  return f;
}

SampledFunction SampledFunction::from_values(const CVector& v, std::size_t ref, cplx below,
                                             cplx above) {
  SampledFunction f = step(v.size(), ref, below, above);
  for (std::size_t i = 0; i < v.size(); ++i) f.residual[i] = v[i] - (i >= ref ? above : below);
  return f;
}

void axpy(SampledFunction& y, cplx a, const SampledFunction& x) {
  if (y.residual.size() != x.residual.size()) {
    fail(ErrorKind::Internal, kModule, "axpy on functions of different size");
  }
  simd::kernels().caxpy(y.residual.data(), a, x.residual.data(), x.residual.size());
  cplx jump = x.above - x.below;
  if (jump != 0.0 && x.ref != y.ref) {
    std::size_t lo = std::min(x.ref, y.ref), hi = std::max(x.ref, y.ref);
    cplx d = a * (y.ref > x.ref ? jump : -jump);
    for (std::size_t i = lo; i < hi && i < y.residual.size(); ++i) y.residual[i] += d;
  }
  y.below += a * x.below;
  y.above += a * x.above;
}

double sup_distance(const SampledFunction& a, const SampledFunction& b) {
  CVector va = a.values(), vb = b.values();
  return std::sqrt(simd::kernels().max_abs2_diff(va.data(), vb.data(), va.size()));
}

SampledFunction indicator_multiply(const SampledFunction& u, Region region, const DualGrid& grid) {
  bool keep_below = region == Region::BelowUpper || region == Region::AtOrBelowLower;
  std::size_t edge = (region == Region::BelowUpper || region == Region::AtOrAboveUpper)
                         ? grid.upper_edge()
                         : grid.lower_edge();
  std::size_t M = u.size();
  SampledFunction out = SampledFunction::zero(M, edge);
  cplx jump = u.above - u.below;
  if (keep_below) {
    out.below = u.below;
    for (std::size_t i = 0; i < edge && i < M; ++i) {
      out.residual[i] = u.residual[i] + (i >= u.ref ? jump : cplx(0.0));
    }
  } else {
    out.above = u.above;
    for (std::size_t i = edge; i < M; ++i) {
      out.residual[i] = u.residual[i] - (i < u.ref ? jump : cplx(0.0));
    }
  }
  return out;
}

EpvOperators::EpvOperators(const WHFactorization& factors, const DualGrid& grid,
                           const EpvOptions& opt)
    : grid_(grid), opt_(opt), Q_(factors.Q), real_q_(factors.Q.imag() == 0.0) {
  scheme_ = opt.scheme;
  if (scheme_ == EpvScheme::Auto) {
    scheme_ = factors.rational ? EpvScheme::CellMass : EpvScheme::DiscreteFactor;
  }
  if (scheme_ == EpvScheme::CellMass && !factors.rational) {
    fail(ErrorKind::Config, kModule, "cell-mass scheme needs a rational factorization");
  }
  if (factors.phi_plus.size() != grid.size()) {
    fail(ErrorKind::Internal, kModule, "factorization sampled on a different grid");
  }
  auto [lo, hi] = analyticity_strip(factors.model);
  for (double w : {opt.damping_plus, opt.damping_minus}) {
    if (!(w > lo && w < hi)) {
      fail(ErrorKind::Contour, kModule,
           "damping " + std::to_string(w) + " outside the analyticity strip");
    }
  }
  full_symbol_ = factors.symbol;
  if (scheme_ == EpvScheme::DiscreteFactor) {
    auto [wp, wm] = discrete_factors(factors.symbol);
    build_side(Side::Plus, factors, opt.damping_plus, &wp);
    build_side(Side::Minus, factors, opt.damping_minus, &wm);
  } else {
    build_side(Side::Plus, factors, opt.damping_plus, nullptr);
    build_side(Side::Minus, factors, opt.damping_minus, nullptr);
  }
}

cplx EpvOperators::tail_at(const SideData& d, long long n) const {
  long long half = static_cast<long long>(grid_.size() / 2);
  if (n < -half) n = -half;
  if (n > half) return 0.0;
  return d.tail[static_cast<std::size_t>(n + half)];
}

void EpvOperators::convolve(CVector& r, const CVector& symbol, double omega, std::size_t P) const {
  const std::size_t M = grid_.size();
  const auto& K = simd::kernels();
  std::vector<double> damp;
  if (omega != 0.0) {
    double xc = grid_.x(M / 2);
    damp.resize(M);
    for (std::size_t i = 0; i < M; ++i) damp[i] = std::exp(omega * (grid_.x(i) - xc));
    for (std::size_t i = 0; i < M; ++i) r[i] *= damp[i];
  }
  Fft fft(P);
  if (P == M) {
    fft.forward(r);
    K.cmul(r.data(), r.data(), symbol.data(), M);
    fft.inverse(r);
  } else {
    CVector buf(P, 0.0);
    std::copy(r.begin(), r.end(), buf.begin());
    fft.forward(buf);
    K.cmul(buf.data(), buf.data(), symbol.data(), P);
    fft.inverse(buf);
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(M), r.begin());
  }
  if (omega != 0.0) {
    for (std::size_t i = 0; i < M; ++i) r[i] /= damp[i];
  }
}

void EpvOperators::build_side(Side side, const WHFactorization& f, double omega,
                              const std::vector<cplx>* one_sided) {
  SideData& d = side == Side::Plus ? plus_ : minus_;
  d.omega = omega;
  const std::size_t M = grid_.size();
  const long long half = static_cast<long long>(M / 2);
  const double dx = grid_.dx();
  d.kernel.assign(M, 0.0);
  d.tail.assign(M + 1, 0.0);
  const double sgn = side == Side::Plus ? 1.0 : -1.0;

  if (scheme_ == EpvScheme::CellMass || scheme_ == EpvScheme::DiscreteFactor) {
    const std::size_t P = 2 * M;
    std::vector<cplx> w(M, 0.0);
    if (one_sided) {
      std::copy(one_sided->begin(), one_sided->end(), w.begin());
      // tail(n) = sum_{l >= n} k_l with l = +-j.
      std::vector<cplx> suffix(static_cast<std::size_t>(half) + 1, 0.0);
      for (long long j = half - 1; j >= 0; --j) {
        suffix[static_cast<std::size_t>(j)] = suffix[static_cast<std::size_t>(j + 1)] + w[static_cast<std::size_t>(j)];
      }
      const cplx total = suffix[0];
      for (long long n = -half; n <= half; ++n) {
        cplx t;
        if (side == Side::Plus) {
          t = n <= 0 ? total : suffix[static_cast<std::size_t>(n)];
        } else {
          t = n >= 1 ? cplx(0.0) : total - suffix[static_cast<std::size_t>(std::min(-n + 1, half))];
        }
        d.tail[static_cast<std::size_t>(n + half)] = t;
      }
    } else {
      const MixtureLaw& law = side == Side::Plus ? f.law_plus : f.law_minus;
      // Cell masses: w_0 = P(Y < dx/2), w_j = P((j-1/2)dx <= Y < (j+1/2)dx).
      cplx w0 = law.a0;
      for (std::size_t j = 0; j < law.a.size(); ++j) w0 -= law.a[j] * cexpm1(-law.beta[j] * (0.5 * dx));
      w[0] = w0;
      for (std::size_t j = 0; j < law.a.size(); ++j) {
        cplx cell = -cexpm1(-law.beta[j] * dx);
        for (std::size_t n = 1; n < M; ++n) {
          w[n] += law.a[j] * std::exp(-law.beta[j] * ((static_cast<double>(n) - 0.5) * dx)) * cell;
        }
      }
      cplx lost = law.tail((static_cast<double>(half) - 0.5) * dx);
      if (std::abs(lost) > 1e-9) {
        fail(ErrorKind::Grid, kModule,
             "kernel mass beyond half the domain is " + std::to_string(std::abs(lost) * 1e9) +
                 "e-9; widen the domain");
      }
      for (long long n = -half; n <= half; ++n) {
        cplx t;
        if (side == Side::Plus) {
          t = n <= 0 ? cplx(1.0) : law.tail((static_cast<double>(n) - 0.5) * dx);
        } else {
          t = n >= 1 ? cplx(0.0) : 1.0 - law.tail((static_cast<double>(-n) + 0.5) * dx);
        }
        d.tail[static_cast<std::size_t>(n + half)] = t;
      }
    }
    // Correlation lags: plus l = n, minus l = -n.
    for (long long n = 0; n < half; ++n) {
      long long l = side == Side::Plus ? n : -n;
      d.kernel[static_cast<std::size_t>(l + half)] = w[static_cast<std::size_t>(n)];
    }
    auto symbol_of = [&](std::size_t len, long long maxlag, double om) {
      CVector a(len, 0.0);
      for (long long n = 0; n < maxlag; ++n) {
        long long l = side == Side::Plus ? n : -n;
        cplx v = w[static_cast<std::size_t>(n)];
        if (om != 0.0) v *= std::exp(-om * static_cast<double>(l) * dx);
        long long idx = l % static_cast<long long>(len);
        if (idx < 0) idx += static_cast<long long>(len);
        a[static_cast<std::size_t>(idx)] += v;
      }
      Fft(len).backward(a.data(), a.data());
      return a;
    };
    d.symbol = symbol_of(M, half, omega);
    CVector inv = symbol_of(P, static_cast<long long>(M), 0.0);
    for (auto& v : inv) v = 1.0 / v;
    d.inv_symbol_undamped = inv;
    if (omega == 0.0) {
      d.inv_symbol = inv;
    } else {
      d.inv_symbol = symbol_of(P, static_cast<long long>(M), omega);
      for (auto& v : d.inv_symbol) v = 1.0 / v;
    }
  } else {
    CVector phi0 = side == Side::Plus ? f.phi_plus : f.phi_minus;
    CVector phiw = omega == 0.0 ? phi0 : factor_on_line(f, grid_, side, omega);
    if (real_q_) {
      phi0[M / 2] = phi0[M / 2].real();
      if (omega == 0.0) phiw[M / 2] = phiw[M / 2].real();
    }
    // Sampled factors of infinite-variation models do not join smoothly
    // across the Nyquist frequency, which leaves an algebraic kernel tail.
    // Above xi_N / 2 log(phi) is blended (C-infinity) into its Nyquist value.
    // The inverse stays the exact reciprocal of the forward symbol.
    if (opt_.nyquist_taper) {
      auto taper = [&](CVector& phi) {
        cplx end = std::log(phi[M / 2]);
        double nyq = std::abs(grid_.xi(M / 2));
        for (std::size_t k = 0; k < M; ++k) {
          double c = smooth_cutoff(std::abs(grid_.xi(k)) / nyq);
          if (c < 1.0) phi[k] = std::exp(c * std::log(phi[k]) + (1.0 - c) * end);
        }
      };
      taper(phi0);
      if (omega != 0.0) taper(phiw); else phiw = phi0;
    }
    d.symbol = phiw;
    d.inv_symbol.resize(M);
    d.inv_symbol_undamped.resize(M);
    for (std::size_t k = 0; k < M; ++k) {
      d.inv_symbol[k] = 1.0 / phiw[k];
      d.inv_symbol_undamped[k] = 1.0 / phi0[k];
    }
    // k_l = (1/M) sum_k phi_k exp(-2 pi i k l / M)
    CVector a = phi0;
    Fft(M).forward(a);
    for (long long l = -half; l < half; ++l) {
      long long idx = l < 0 ? l + static_cast<long long>(M) : l;
      d.kernel[static_cast<std::size_t>(l + half)] = a[static_cast<std::size_t>(idx)] / static_cast<double>(M);
    }
    cplx acc = 0.0;
    d.tail[static_cast<std::size_t>(2 * half)] = 0.0;
    for (long long n = half - 1; n >= -half; --n) {
      acc += d.kernel[static_cast<std::size_t>(n + half)];
      d.tail[static_cast<std::size_t>(n + half)] = acc;
    }
  }
  (void)sgn;
  d.e_lower = step_correction(d, grid_.lower_edge());
  d.e_upper = step_correction(d, grid_.upper_edge());
}

std::pair<std::vector<cplx>, std::vector<cplx>> EpvOperators::discrete_factors(
    const CVector& symbol) const {
  const std::size_t M = grid_.size();
  const std::size_t half = M / 2;
  // Continuous log of the symbol, walked outwards from xi = 0 on both sides.
  CVector L(M);
  L[0] = std::log(symbol[0]);
  auto step_log = [&](std::size_t from, std::size_t to) {
    cplx d = std::log(symbol[to] / symbol[from]);
    L[to] = L[from] + d;
  };
  for (std::size_t k = 1; k <= half; ++k) step_log(k - 1, k);
  if (M > 1) step_log(0, M - 1);
  for (std::size_t k = M - 1; k > half + 1; --k) step_log(k, k - 1);
  cplx back = L[half + 1] + std::log(symbol[half] / symbol[half + 1]);
  if (std::abs(back - L[half]) > 1.0) {
    fail(ErrorKind::Contour, kModule, "Q + psi winds around zero on the grid frequencies");
  }
  if (std::abs(L[0]) > 1e-12) {
    fail(ErrorKind::Internal, kModule, "symbol differs from 1 at xi = 0");
  }
  L[0] = 0.0;
  if (opt_.nyquist_taper) {
    const cplx end = L[half];
    const double nyq = std::abs(grid_.xi(half));
    for (std::size_t k = 0; k < M; ++k) {
      double c = smooth_cutoff(std::abs(grid_.xi(k)) / nyq);
      L[k] = c * L[k] + (1.0 - c) * end;
    }
  }
  // Coefficients of the log by lag, split into the two one-sided parts.
  Fft fft(M);
  CVector c = L;
  fft.forward(c);
  for (auto& v : c) v /= static_cast<double>(M);
  CVector gp(M, 0.0), gm(M, 0.0);
  cplx sp = 0.0, sm = 0.0;
  for (std::size_t l = 1; l < half; ++l) {
    gp[l] = c[l];
    gm[M - l] = c[M - l];
    sp += c[l];
    sm += c[M - l];
  }
  gp[half] = 0.5 * c[half];
  gm[half] = 0.5 * c[half];
  sp += gp[half];
  sm += gm[half];
  gp[0] = -sp;
  gm[0] = -sm;

  auto factor_kernel = [&](CVector g) {
    fft.backward(g.data(), g.data());
    for (auto& v : g) v = std::exp(v);
    fft.forward(g);
    for (auto& v : g) v /= static_cast<double>(M);
    return g;
  };
  CVector kp = factor_kernel(gp), km = factor_kernel(gm);
  std::vector<cplx> wp(half), wm(half);
  double wrap_p = 0.0, wrap_m = 0.0, mass = 0.0;
  for (std::size_t n = 0; n < half; ++n) {
    wp[n] = kp[n];
    wm[n] = km[n == 0 ? 0 : M - n];
    mass += std::abs(wp[n]) + std::abs(wm[n]);
  }
  for (std::size_t n = half; n < M; ++n) wrap_p += std::abs(kp[n]);
  for (std::size_t n = 1; n <= half; ++n) wrap_m += std::abs(km[n]);
  if (std::max(wrap_p, wrap_m) > 1e-9 * mass) {
    fail(ErrorKind::Grid, kModule,
         "discrete factor kernels wrap around the period (" + std::to_string(std::max(wrap_p, wrap_m) / mass) +
             "); widen the domain");
  }
  return {std::move(wp), std::move(wm)};
}

CVector EpvOperators::step_correction(const SideData& d, std::size_t ref) const {
  const std::size_t M = grid_.size();
  CVector r(M);
  for (std::size_t i = 0; i < M; ++i) {
    long long n = static_cast<long long>(ref) - static_cast<long long>(i);
    r[i] = tail_at(d, n) - (i >= ref ? 1.0 : 0.0);
  }
  convolve(r, d.inv_symbol_undamped, 0.0, d.inv_symbol_undamped.size());
  for (auto& v : r) v = -v;
  return r;
}

SampledFunction EpvOperators::apply(Side side, const SampledFunction& u) const {
  const SideData& d = side_(side);
  const std::size_t M = grid_.size();
  if (u.size() != M) fail(ErrorKind::Internal, kModule, "function sampled on a different grid");
  double scale = scale_of(u);
  if (smooth_end_size(u.residual) > opt_.decay_tol * std::max(scale, opt_.scale_floor) && scale > 0.0) {
    fail(ErrorKind::Grid, kModule, "residual does not decay at the grid ends; widen the domain");
  }
  SampledFunction out = u;
  convolve(out.residual, d.symbol, d.omega, M);
  cplx jump = u.above - u.below;
  if (jump != 0.0) {
    for (std::size_t i = 0; i < M; ++i) {
      long long n = static_cast<long long>(u.ref) - static_cast<long long>(i);
      out.residual[i] += jump * (tail_at(d, n) - (i >= u.ref ? 1.0 : 0.0));
    }
  }
  return out;
}

SampledFunction EpvOperators::apply_inverse(Side side, const SampledFunction& u) const {
  const SideData& d = side_(side);
  const std::size_t M = grid_.size();
  if (u.size() != M) fail(ErrorKind::Internal, kModule, "function sampled on a different grid");
  double scale = scale_of(u);
  if (smooth_end_size(u.residual) > opt_.decay_tol * std::max(scale, opt_.scale_floor) && scale > 0.0) {
    fail(ErrorKind::Grid, kModule, "residual does not decay at the grid ends; widen the domain");
  }
  SampledFunction out = u;
  convolve(out.residual, d.inv_symbol, d.omega, d.inv_symbol.size());
  cplx jump = u.above - u.below;
  if (jump != 0.0) {
    CVector e;
    const CVector* ep;
    if (u.ref == grid_.lower_edge()) {
      ep = &d.e_lower;
    } else if (u.ref == grid_.upper_edge()) {
      ep = &d.e_upper;
    } else {
      e = step_correction(d, u.ref);
      ep = &e;
    }
    simd::kernels().caxpy(out.residual.data(), jump, ep->data(), M);
  }
  double out_scale = scale_of(out);
  if (end_size(out.residual) > opt_.growth_tol * std::max(out_scale, opt_.scale_floor) && out_scale > 0.0) {
    fail(ErrorKind::IllPosed, kModule, "inverse-transformed residual grows towards the grid ends");
  }
  return out;
}

SampledFunction EpvOperators::apply_symbol(const SampledFunction& u) const {
  if (u.above != u.below) {
    fail(ErrorKind::IllPosed, kModule, "full multiplier applied to a function with a far-field step");
  }
  SampledFunction out = u;
  convolve(out.residual, full_symbol_, 0.0, grid_.size());
  return out;
}

double EpvOperators::kernel_undershoot(Side side) const {
  const SideData& d = side_(side);
  double total = 0.0, worst = 0.0;
  for (const auto& k : d.kernel) {
    total += std::abs(k);
    worst = std::min(worst, k.real());
  }
  return total > 0.0 ? worst / total : 0.0;
}

}  // namespace rsb
