#include "rsbarrier/pricer.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "rsbarrier/errors.hpp"
#include "rsbarrier/parallel.hpp"
#include "rsbarrier/simd.hpp"
#include "rsbarrier/wiener_hopf.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "pricer_core";
constexpr std::size_t kDirectLimit = 1000;

struct DiffStats {
  double sup = 0.0;
  double min_re = 0.0;
};

DiffStats diff_stats(const SampledFunction& a, const SampledFunction& b) {
  CVector va = a.values(), vb = b.values();
  const auto& K = simd::kernels();
  return {std::sqrt(K.max_abs2_diff(va.data(), vb.data(), va.size())),
          K.min_real_diff(va.data(), vb.data(), va.size())};
}

std::vector<cplx> solve_direct(const MemoryChain& chain, const std::vector<cplx>& diag,
                               const std::vector<cplx>& rhs) {
  const std::size_t n = chain.size();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t h = 0; h < n; ++h) {
    trips.emplace_back(static_cast<int>(h), static_cast<int>(h), diag[h]);
    int h0 = chain.current_regime(h);
    for (int s = 1; s <= chain.m(); ++s) {
      if (s == h0 || chain.rate(h, s) == 0.0) continue;
      trips.emplace_back(static_cast<int>(h), static_cast<int>(chain.next(h, s)),
                         cplx(-chain.rate(h, s)));
    }
  }
  Eigen::SparseMatrix<cplx> A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    fail(ErrorKind::SpectralParameter, kModule, "V0 system is singular");
  }
  Eigen::VectorXcd b(static_cast<int>(n));
  for (std::size_t h = 0; h < n; ++h) b[static_cast<int>(h)] = rhs[h];
  Eigen::VectorXcd x = lu.solve(b);
  return std::vector<cplx>(x.data(), x.data() + n);
}

std::vector<cplx> solve_jacobi(const MemoryChain& chain, const std::vector<cplx>& diag,
                               const std::vector<cplx>& rhs) {
  const std::size_t n = chain.size();
  std::vector<cplx> x(n, 0.0), y(n);
  for (int it = 0; it < 100000; ++it) {
    double change = 0.0, size = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
      cplx acc = rhs[h];
      int h0 = chain.current_regime(h);
      for (int s = 1; s <= chain.m(); ++s) {
        if (s != h0) acc += chain.rate(h, s) * x[chain.next(h, s)];
      }
      y[h] = acc / diag[h];
      change = std::max(change, std::abs(y[h] - x[h]));
      size = std::max(size, std::abs(y[h]));
    }
    x.swap(y);
    if (change <= 1e-15 * size) return x;
  }
  fail(ErrorKind::SpectralParameter, kModule, "Jacobi iteration for V0 did not converge");
}

}  // namespace

std::vector<cplx> solve_v0(const MemoryChain& chain, const std::vector<double>& r,
                           const std::vector<double>& G, cplx q) {
  const std::size_t n = chain.size();
  if (r.size() != static_cast<std::size_t>(chain.m()) ||
      G.size() != static_cast<std::size_t>(chain.m())) {
    fail(ErrorKind::Config, kModule, "rates and payoffs must have one entry per regime");
  }
  std::vector<cplx> diag(n), rhs(n);
  bool dominant = true;
  for (std::size_t h = 0; h < n; ++h) {
    diag[h] = q_of_history(chain, r, h, q);
    rhs[h] = G[static_cast<std::size_t>(chain.current_regime(h) - 1)];
    if (!(std::abs(diag[h]) > chain.lambda_h(h))) dominant = false;
  }
  std::vector<cplx> x = (n <= kDirectLimit || !dominant) ? solve_direct(chain, diag, rhs)
                                                         : solve_jacobi(chain, diag, rhs);
  double res = 0.0, xs = 0.0, bs = 0.0, as = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    cplx acc = diag[h] * x[h] - rhs[h];
    double row = std::abs(diag[h]);
    int h0 = chain.current_regime(h);
    for (int s = 1; s <= chain.m(); ++s) {
      if (s == h0) continue;
      acc -= chain.rate(h, s) * x[chain.next(h, s)];
      row += chain.rate(h, s);
    }
    res = std::max(res, std::abs(acc));
    xs = std::max(xs, std::abs(x[h]));
    bs = std::max(bs, std::abs(rhs[h]));
    as = std::max(as, row);
  }
  if (!(res <= 1e-12 * (as * xs + bs)) ) {
    std::ostringstream os;
    os << "V0 residual " << res << " at q = " << q;
    fail(ErrorKind::SpectralParameter, kModule, os.str());
  }
  return x;
}

Pricer::Pricer(BarrierProblem problem, PricerOptions opt)
    : problem_(std::move(problem)), opt_(opt) {
  const auto& p = problem_;
  if (p.regimes.size() != static_cast<std::size_t>(p.chain.m())) {
    fail(ErrorKind::Config, kModule, "regime count does not match the chain");
  }
  if (!(p.lower < p.upper)) fail(ErrorKind::Config, kModule, "barriers must satisfy lower < upper");
  if (!(opt_.tol_inner > 0.0 && opt_.tol_outer > 0.0)) {
    fail(ErrorKind::Config, kModule, "tolerances must be positive");
  }
  grid_ = DualGrid::for_band(p.lower, p.upper, opt_.grid);
  for (const auto& reg : p.regimes) {
    r_.push_back(reg.r);
    G_.push_back(reg.G);
  }
}

double Pricer::scale(cplx q) const {
  double g = 0.0;
  for (double v : G_) g = std::max(g, std::abs(v));
  return g / std::abs(q);
}

std::vector<EpvOperators> Pricer::operators(cplx q) const {
  const int m = problem_.chain.m();
  std::vector<std::optional<EpvOperators>> tmp(static_cast<std::size_t>(m));
  EpvOptions eo = opt_.epv;
  eo.scale_floor = std::max(eo.scale_floor, 1e-3 * scale(q));
  parallel_for(tmp.size(), opt_.threads, [&](std::size_t j) {
    cplx Q = q_uniform(problem_.chain, r_, static_cast<int>(j) + 1, q);
    WHFactorization f = factorize(problem_.regimes[j].model, Q, grid_);
    tmp[j].emplace(f, grid_, eo);
  });
  std::vector<EpvOperators> ops;
  ops.reserve(tmp.size());
  for (auto& o : tmp) ops.push_back(std::move(*o));
  return ops;
}

SampledFunction Pricer::boundary_term(Side side, const EpvOperators& ops,
                                      const SampledFunction& g) const {
  SampledFunction t = ops.apply_inverse(side, g);
  t = indicator_multiply(t, side == Side::Plus ? Region::AtOrAboveUpper : Region::AtOrBelowLower,
                         grid_);
  return ops.apply(side, t);
}

std::vector<SampledFunction> Pricer::sweep(Side side, const std::vector<SampledFunction>& current,
                                           const std::vector<SampledFunction>& boundary,
                                           const std::vector<EpvOperators>& ops) const {
  const MemoryChain& chain = problem_.chain;
  const std::size_t n = chain.size();
  const Side other = side == Side::Plus ? Side::Minus : Side::Plus;
  const Region keep = side == Side::Plus ? Region::BelowUpper : Region::AboveLower;
  std::vector<SampledFunction> out(n);
  parallel_for(n, opt_.threads, [&](std::size_t h) {
    int h0 = chain.current_regime(h);
    const EpvOperators& E = ops[static_cast<std::size_t>(h0 - 1)];
    SampledFunction f = SampledFunction::zero(grid_.size(), current[h].ref);
    bool any = false;
    double own = chain.lambda0() - chain.lambda_h(h);
    if (own != 0.0) {
      axpy(f, own, current[h]);
      any = true;
    }
    for (int s = 1; s <= chain.m(); ++s) {
      if (s == h0 || chain.rate(h, s) == 0.0) continue;
      axpy(f, chain.rate(h, s), current[chain.next(h, s)]);
      any = true;
    }
    out[h] = boundary[h];
    if (!any) return;
    SampledFunction t = E.apply(other, f);
    t = indicator_multiply(t, keep, grid_);
    t = E.apply(side, t);
    axpy(out[h], 1.0 / E.Q(), t);
  });
  return out;
}

std::vector<SampledFunction> Pricer::inner_iteration(Side side,
                                                     const std::vector<SampledFunction>& prev,
                                                     const std::vector<EpvOperators>& ops, cplx q,
                                                     InnerStats* stats) const {
  const MemoryChain& chain = problem_.chain;
  const std::size_t n = chain.size();
  const double sc = scale(q);
  const double tol = opt_.tol_inner * sc;
  const bool real_q = q.imag() == 0.0;
  InnerStats local;
  InnerStats& st = stats ? *stats : local;
  st = InnerStats{};

  std::vector<SampledFunction> B(n);
  parallel_for(n, opt_.threads, [&](std::size_t h) {
    const auto& E = ops[static_cast<std::size_t>(chain.current_regime(h) - 1)];
    B[h] = boundary_term(side, E, prev[h]);
  });

  // Sweep 1 from the zero start is the boundary term itself.
  std::vector<SampledFunction> cur = B;
  st.sweeps = 1;
  {
    double d = 0.0, mn = 0.0;
    for (const auto& b : B) {
      SampledFunction z = SampledFunction::zero(grid_.size());
      DiffStats ds = diff_stats(b, z);
      d = std::max(d, ds.sup);
      mn = std::min(mn, ds.min_re);
    }
    st.diffs.push_back(d);
    if (real_q && sc > 0.0) st.min_increment = mn / sc;
    if (d <= tol) return cur;
  }

  const double bound = chain.lambda0() / std::abs(ops.front().Q());
  int bad = 0;
  while (true) {
    if (st.sweeps >= opt_.max_sweeps) {
      std::ostringstream os;
      os << "inner iteration did not converge in " << opt_.max_sweeps << " sweeps at q = " << q;
      fail(ErrorKind::ContractionFailure, kModule, os.str());
    }
    std::vector<SampledFunction> next = sweep(side, cur, B, ops);
    ++st.sweeps;
    double d = 0.0, mn = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
      DiffStats ds = diff_stats(next[h], cur[h]);
      d = std::max(d, ds.sup);
      mn = std::min(mn, ds.min_re);
    }
    cur.swap(next);
    double prev_d = st.diffs.back();
    st.diffs.push_back(d);
    if (real_q && sc > 0.0) st.min_increment = std::min(st.min_increment, mn / sc);
    if (d <= tol) break;
    if (prev_d > 100.0 * tol) {
      double ratio = d / prev_d;
      st.max_ratio = std::max(st.max_ratio, ratio);
      bad = ratio >= 1.0 ? bad + 1 : 0;
      if (bad >= 3) {
        std::ostringstream os;
        os << "inner iteration is not contracting at q = " << q << ": empirical rate " << ratio
           << ", bound Lambda0/|Q| = " << bound;
        fail(ErrorKind::ContractionFailure, kModule, os.str());
      }
    }
  }
  return cur;
}

std::vector<SampledFunction> Pricer::outer_series(const std::vector<EpvOperators>& ops, cplx q,
                                                  const std::vector<cplx>& v0,
                                                  PricerDiagnostics& diag) const {
  const std::size_t n = problem_.chain.size();
  const std::size_t M = grid_.size();
  const double sc = scale(q);
  std::vector<SampledFunction> vm(n), vp(n), v1(n);
  for (std::size_t h = 0; h < n; ++h) {
    vm[h] = SampledFunction::step(M, grid_.upper_edge(), 0.0, v0[h]);
    vp[h] = SampledFunction::step(M, grid_.lower_edge(), v0[h], 0.0);
    v1[h] = SampledFunction::zero(M);
  }
  int rising = 0;
  for (int l = 1;; ++l) {
    if (l > opt_.max_terms) {
      std::ostringstream os;
      os << "outer series did not converge in " << opt_.max_terms << " terms at q = " << q;
      fail(ErrorKind::Divergence, kModule, os.str());
    }
    InnerStats sp, sm;
    std::vector<SampledFunction> np = inner_iteration(Side::Plus, vm, ops, q, &sp);
    std::vector<SampledFunction> nm = inner_iteration(Side::Minus, vp, ops, q, &sm);
    for (const auto* s : {&sp, &sm}) {
      diag.max_sweeps = std::max(diag.max_sweeps, s->sweeps);
      diag.max_ratio = std::max(diag.max_ratio, s->max_ratio);
      diag.min_increment = std::min(diag.min_increment, s->min_increment);
    }
    diag.inner.push_back(std::move(sp));
    diag.inner.push_back(std::move(sm));
    double norm = 0.0;
    const double sign = (l % 2 == 1) ? -1.0 : 1.0;
    for (std::size_t h = 0; h < n; ++h) {
      SampledFunction term = np[h];
      axpy(term, 1.0, nm[h]);
      norm = std::max(norm, term.sup_norm());
      axpy(v1[h], sign, term);
    }
    if (!diag.term_norms.empty()) rising = norm >= diag.term_norms.back() ? rising + 1 : 0;
    diag.term_norms.push_back(norm);
    if (norm <= opt_.tol_outer * sc) break;
    if (rising >= 3) {
      std::ostringstream os;
      os << "outer series term norms stopped decreasing at q = " << q;
      fail(ErrorKind::Divergence, kModule, os.str());
    }
    vp.swap(np);
    vm.swap(nm);
  }
  return v1;
}

cplx Pricer::interpolate(const SampledFunction& u, double x) const {
  const long long lo = static_cast<long long>(grid_.lower_edge());
  const long long hi = static_cast<long long>(grid_.upper_edge());
  if (hi - lo < 4) fail(ErrorKind::Grid, kModule, "fewer than four grid points inside the band");
  double pos = (x - grid_.x_min()) / grid_.dx() - 0.5;
  long long i0 = static_cast<long long>(std::floor(pos)) - 1;
  i0 = std::clamp(i0, lo, hi - 4);
  double t = pos - static_cast<double>(i0);
  cplx acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    double w = 1.0;
    for (int k = 0; k < 4; ++k)
      if (k != j) w *= (t - k) / static_cast<double>(j - k);
    acc += w * u.at(static_cast<std::size_t>(i0 + j));
  }
  return acc;
}

PricerResult Pricer::price_tilde(cplx q) const {
  const MemoryChain& chain = problem_.chain;
  const std::size_t n = chain.size();
  PricerResult res;
  res.q = q;
  res.v0 = solve_v0(chain, r_, G_, q);
  res.at_spot.assign(n, 0.0);
  double min_r = *std::min_element(r_.begin(), r_.end());
  res.diag.contraction_bound = chain.lambda0() / std::abs(q + chain.lambda0() + min_r);

  const double x0 = problem_.spot;
  if (!(x0 > problem_.lower && x0 < problem_.upper && x0 > grid_.lower() && x0 < grid_.upper())) {
    res.outside_band = true;
    return res;
  }
  const double sc = scale(q);
  if (sc == 0.0) return res;

  std::vector<EpvOperators> ops = operators(q);
  std::vector<SampledFunction> v = outer_series(ops, q, res.v0, res.diag);
  const std::size_t lo = grid_.lower_edge(), hi = grid_.upper_edge();
  double outside = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    v[h].below += res.v0[h];
    v[h].above += res.v0[h];
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (i >= lo && i < hi) continue;
      outside = std::max(outside, std::abs(v[h].at(i)));
    }
    res.at_spot[h] = interpolate(v[h], x0);
  }
  res.diag.max_outside = outside / sc;
  if (res.diag.max_outside > opt_.outside_tol) {
    std::ostringstream os;
    os << "value outside the band is " << res.diag.max_outside << " (relative) at q = " << q;
    fail(ErrorKind::Internal, kModule, os.str());
  }
  if (opt_.keep_field) res.field = std::move(v);
  return res;
}

}  // namespace rsb
