#include <cmath>

#include "doctest.h"
#include "rsbarrier/mc_oracle.hpp"
#include "test_util.hpp"

using namespace rsb;

namespace {

BarrierProblem brownian_band(double lo = -1.0, double hi = 1.0, double spot = 0.0) {
  BarrierProblem p;
  p.regimes = {Regime{LevyModel::brownian(0.0, 1.0), 0.0, 1.0}};
  p.lower = lo;
  p.upper = hi;
  p.spot = spot;
  p.maturity = 1.0;
  return p;
}

BarrierProblem kou_chain() {
  BarrierProblem p;
  p.regimes = {Regime{LevyModel::kou(0.0, 0.04, 1.0, 0.5, 10.0, 5.0), 0.02, 1.0},
               Regime{LevyModel::kou(0.05, 0.09, 2.0, 0.3, 8.0, 6.0), 0.05, 0.8}};
  p.chain = MemoryChain(2, 1, {0.0, 1.5, 0.8, 0.0});
  p.lower = -0.35;
  p.upper = 0.3;
  p.maturity = 0.5;
  p.initial = HistoryIndex{{1, 2}};
  return p;
}

McConfig cfg(std::size_t paths, double dt, bool bridge = true) {
  McConfig c;
  c.paths = paths;
  c.dt = dt;
  c.bridge = bridge;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("series oracle") {
  // sum over odd k of (4 / (k pi)) sin(k pi (x0 - h-) / 2) exp(-k^2 pi^2 / 8)
  double want = 0.0;
  for (int k = 1; k < 40; k += 2) {
    want += 4.0 / (k * M_PI) * std::sin(k * M_PI * 0.5) * std::exp(-k * k * M_PI * M_PI / 8.0);
  }
  auto s = brownian_band_series(1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 1.0, 7);
  CHECK(std::abs(s.value - want) < 1e-10);
  CHECK(s.next_term < 1e-10);

  // Reflection at zero drift, boundary limit, discounting.
  auto a = brownian_band_series(0.5, 0.0, 0.0, -0.4, 1.0, 0.1, 2.0, 50);
  auto b = brownian_band_series(0.5, 0.0, 0.0, -0.4, 1.0, 0.5, 2.0, 50);
  CHECK(std::abs(a.value - b.value) < 1e-13);
  CHECK(std::abs(brownian_band_series(1.0, 0.3, 0.0, -1.0, 1.0, -1.0 + 1e-9, 1.0, 50).value) < 1e-8);
  auto d0 = brownian_band_series(1.0, 0.3, 0.0, -1.0, 1.0, 0.2, 1.0, 50);
  auto d1 = brownian_band_series(1.0, 0.3, 0.1, -1.0, 1.0, 0.2, 1.0, 50);
  CHECK(std::abs(d1.value - std::exp(-0.1) * d0.value) < 1e-14);
  // Drift flips with the band.
  auto e0 = brownian_band_series(1.0, 0.3, 0.0, -1.0, 0.5, 0.2, 1.0, 50);
  auto e1 = brownian_band_series(1.0, -0.3, 0.0, -0.5, 1.0, -0.2, 1.0, 50);
  CHECK(std::abs(e0.value - e1.value) < 1e-13);
}

TEST_CASE("sure survival and spot on the barrier") {
  auto p = brownian_band(-1e6, 1e6);
  auto r = simulate_price(p, cfg(2000, 0.01));
  CHECK(r.estimate == 1.0);
  CHECK(r.stderr_ == 0.0);
  auto q = kou_chain();
  q.spot = q.upper;
  auto z = simulate_price(q, cfg(2000, 0.01));
  CHECK(z.estimate == 0.0);
}

TEST_CASE("seeded runs are bit-identical, also across threads") {
  auto p = kou_chain();
  auto c = cfg(4000, 1e-3);
  auto a = simulate_price(p, c);
  auto b = simulate_price(p, c);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
  c.threads = 2;
  auto t = simulate_price(p, c);
  CHECK(t.estimate == a.estimate);
  c.seed = 8;
  CHECK(simulate_price(p, c).estimate != a.estimate);
}

TEST_CASE("standard error scales like 1/sqrt(paths)") {
  auto p = kou_chain();
  auto a = simulate_price(p, cfg(2000, 5e-3));
  auto b = simulate_price(p, cfg(32000, 5e-3));
  double ratio = a.stderr_ / b.stderr_;
  CHECK(ratio > 4.0 * 0.8);
  CHECK(ratio < 4.0 * 1.2);
}

TEST_CASE("simulation agrees with the series") {
  auto p = brownian_band();
  auto r = simulate_price(p, cfg(100000, 1e-3));
  auto s = brownian_band_series(1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 1.0, 20);
  CHECK(std::abs(r.estimate - s.value) < 3.0 * r.stderr_);
}

TEST_CASE("discrete monitoring over-prices survival") {
  auto p = brownian_band();
  auto bridge = simulate_price(p, cfg(40000, 2e-2)).estimate;
  auto coarse = simulate_price(p, cfg(40000, 2e-2, false)).estimate;
  auto fine = simulate_price(p, cfg(40000, 1e-2, false)).estimate;
  CHECK(coarse > fine);
  CHECK(fine > bridge);
}

TEST_CASE("path streams") {
  PathRng a(1, 5), b(1, 5), c(1, 6);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  PathRng g(3, 0);
  for (int i = 0; i < n; ++i) {
    double z = g.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
  PathRng e(3, 1);
  double m = 0.0, umin = 1.0, umax = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = e.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    m += e.exponential(2.0);
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(m / n - 0.5) < 0.01);
}
