#include <cmath>

#include "doctest.h"
#include "rsbarrier/wiener_hopf.hpp"
#include "test_util.hpp"

using namespace rsb;
using rsbtest::error_kind;

namespace {

DualGrid small_grid(std::size_t M = 4096) {
  GridOptions go;
  go.M = M;
  return DualGrid::for_band(-1.0, 1.0, go);
}

LevyModel kou_a() { return LevyModel::kou(0.0, 0.04, 1.0, 0.5, 10.0, 5.0); }
LevyModel kou_b() { return LevyModel::kou(0.05, 0.09, 2.0, 0.3, 8.0, 6.0); }
LevyModel kobol_a() { return LevyModel::kobol(1.2, 1.0, 8.0, -4.0, 0.0); }

}  // namespace

TEST_CASE("Brownian factors in closed form") {
  auto g = small_grid();
  auto f = factorize_rational(LevyModel::brownian(0.0, 2.0), 1.0, g);
  REQUIRE(f.beta_plus.size() == 1);
  REQUIRE(f.beta_minus.size() == 1);
  CHECK(std::abs(f.beta_plus[0] - 1.0) < 1e-14);
  CHECK(std::abs(f.beta_minus[0] - 1.0) < 1e-14);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double xi = g.xi(k);
    worst = std::max(worst, std::abs(f.phi_plus[k] - 1.0 / cplx(1.0, -xi)));
    worst = std::max(worst, std::abs(f.phi_minus[k] - 1.0 / cplx(1.0, xi)));
  }
  CHECK(worst < 1e-14);
  CHECK(f.product_residual() < 1e-13);
}

TEST_CASE("factors equal one at the origin") {
  auto g = small_grid();
  for (const auto& m : {LevyModel::brownian(0.2, 0.5), kou_a(), kou_b(), kobol_a()}) {
    for (cplx Q : {cplx(0.5), cplx(3.0, 4.0)}) {
      auto f = factorize(m, Q, g);
      CHECK(std::abs(f.phi_plus[0] - 1.0) < 1e-12);
      CHECK(std::abs(f.phi_minus[0] - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("Kou quartic splits two and two") {
  auto g = small_grid();
  auto f = factorize_rational(kou_a(), 1.0, g);
  CHECK(f.beta_plus.size() == 2);
  CHECK(f.beta_minus.size() == 2);
  for (auto b : f.beta_plus) CHECK(b.real() > 0.0);
  for (auto b : f.beta_minus) CHECK(b.real() > 0.0);
  CHECK(f.product_residual() < 1e-12);
}

TEST_CASE("product identity over the spectral test set") {
  auto g = small_grid();
  for (cplx Q : {cplx(0.5), cplx(1.0), cplx(10.0), cplx(3.0, 4.0)}) {
    for (const auto& m : {LevyModel::brownian(0.1, 1.0), kou_a(), kou_b()}) {
      CHECK(factorize_rational(m, Q, g).product_residual() < 1e-10);
    }
    CHECK(factorize_integral(kobol_a(), Q, g).product_residual() < 1e-6);
  }
}

TEST_CASE("integral route reproduces the rational factors") {
  auto g = small_grid();
  auto m = LevyModel::brownian(0.0, 2.0);
  auto a = factorize_rational(m, 1.0, g);
  auto b = factorize_integral(m, 1.0, g);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(g.xi(k)) > 50.0) continue;
    worst = std::max(worst, std::abs(a.phi_plus[k] - b.phi_plus[k]));
    worst = std::max(worst, std::abs(a.phi_minus[k] - b.phi_minus[k]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("KoBoL product identity at Q = 2") {
  auto g = DualGrid::for_band(-1.0, 1.0);
  CHECK(factorize_integral(kobol_a(), 2.0, g).product_residual() < 1e-6);
}

TEST_CASE("symmetric model gives mirrored factors") {
  auto g = small_grid();
  auto m = LevyModel::kou(0.0, 0.1, 1.5, 0.5, 6.0, 6.0);
  for (bool integral : {false, true}) {
    auto f = integral ? factorize_integral(m, 1.5, g) : factorize_rational(m, 1.5, g);
    const std::size_t M = g.size();
    double worst = 0.0;
    for (std::size_t k = 1; k < M / 2; ++k) {
      // inf = -sup in law, so phi-(xi) = phi+(-xi); xi_{M-k} = -xi_k.
      worst = std::max(worst, std::abs(f.phi_minus[k] - f.phi_plus[M - k]));
    }
    CHECK(worst < (integral ? 1e-8 : 1e-13));
  }
}

TEST_CASE("real Q gives characteristic functions") {
  auto g = small_grid();
  for (const auto& m : {kou_a(), kou_b(), kobol_a()}) {
    auto f = factorize(m, 0.7, g);
    double over = 0.0, asym = 0.0;
    const std::size_t M = g.size();
    for (std::size_t k = 0; k < M; ++k) {
      over = std::max({over, std::abs(f.phi_plus[k]) - 1.0, std::abs(f.phi_minus[k]) - 1.0});
      if (k > 0 && k != M / 2) asym = std::max(asym, std::abs(f.phi_plus[M - k] - std::conj(f.phi_plus[k])));
    }
    CHECK(over < 1e-12);
    CHECK(asym < 1e-10);
  }
}

TEST_CASE("rational factors are analytic and zero-free off the axis") {
  auto g = small_grid(1024);
  auto f = factorize_rational(kou_b(), 1.0, g);
  auto [lo, hi] = analyticity_strip(kou_b());
  for (double t : {-30.0, -1.0, 0.0, 2.0, 40.0}) {
    for (double y : {0.9 * lo, 0.0, 3.0, 50.0}) {
      cplx v = f.phi(Side::Plus, cplx(t, y));
      CHECK(std::isfinite(std::abs(v)));
      CHECK(std::abs(v) > 0.0);
    }
    for (double y : {0.9 * hi, 0.0, -3.0, -50.0}) {
      cplx v = f.phi(Side::Minus, cplx(t, y));
      CHECK(std::isfinite(std::abs(v)));
      CHECK(std::abs(v) > 0.0);
    }
  }
}

TEST_CASE("Brownian supremum law is exponential") {
  auto g = small_grid();
  auto f = factorize_rational(LevyModel::brownian(0.0, 2.0), 1.0, g);
  for (double y : {0.1, 1.0, 3.0}) {
    CHECK(std::abs(f.law_plus.tail(y) - std::exp(-y)) < 1e-8);
    CHECK(std::abs(f.law_minus.tail(y) - std::exp(-y)) < 1e-8);
  }
  // Drifted case: beta+ = (-mu + sqrt(mu^2 + 2 Q s2)) / s2.
  double mu = 0.3, s2 = 0.5, Q = 0.8;
  auto d = factorize_rational(LevyModel::brownian(mu, s2), Q, g);
  double bp = (-mu + std::sqrt(mu * mu + 2.0 * Q * s2)) / s2;
  for (double y : {0.05, 0.5, 2.0}) CHECK(std::abs(d.law_plus.tail(y) - std::exp(-bp * y)) < 1e-8);
}

TEST_CASE("degenerate and ill-posed spectral values") {
  auto g = small_grid(1024);
  // Q + xi^2 = 0 has real roots at Q = -1.
  CHECK(error_kind([&] { factorize_rational(LevyModel::brownian(0.0, 2.0), -1.0, g); }) ==
        ErrorKind::Degenerate);
  CHECK(error_kind([&] { factorize_integral(kobol_a(), 0.0, g); }) == ErrorKind::SpectralParameter);
}
