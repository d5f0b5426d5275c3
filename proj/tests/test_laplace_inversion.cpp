#include <cmath>

#include "doctest.h"
#include "rsbarrier/laplace_inversion.hpp"
#include "test_util.hpp"

using namespace rsb;
using rsbtest::error_kind;

namespace {

double gwr(const std::function<double(double)>& F, double tau, int n, bool extended = false) {
  std::vector<double> s;
  for (double q : gwr_nodes(tau, n)) s.push_back(F(q));
  return gwr_invert(s, tau, n, extended).value;
}

double sinh_inv(const std::function<cplx(cplx)>& F, double tau, int nodes = 40) {
  SinhPlan p;
  p.tau = tau;
  p.nodes = nodes;
  return sinh_bromwich_invert(F, p).value;
}

}  // namespace

TEST_CASE("Gaver nodes") {
  auto a = gwr_nodes(std::log(2.0), 2);
  REQUIRE(a.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(a[k] == doctest::Approx(k + 1.0).epsilon(1e-15));
  auto b = gwr_nodes(1.0, 8), c = gwr_nodes(2.0, 8);
  REQUIRE(b.size() == 16);
  CHECK(b.back() == doctest::Approx(16.0 * std::log(2.0)).epsilon(1e-15));
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(c[k] == doctest::Approx(0.5 * b[k]).epsilon(1e-15));
  for (std::size_t k = 1; k < b.size(); ++k) CHECK(b[k] > b[k - 1]);
}

TEST_CASE("GWR on known pairs") {
  for (int n = 4; n <= 16; n += 2) CHECK(std::abs(gwr([](double q) { return 1.0 / q; }, 1.7, n) - 1.0) < 1e-12);
  CHECK(std::abs(gwr([](double q) { return 1.0 / (q + 1.0); }, 1.0, 8) - std::exp(-1.0)) < 1e-6);
  CHECK(std::abs(gwr([](double q) { return 1.0 / (q * q); }, 2.0, 8) - 2.0) < 1e-7);
  // Past n = 8 double-precision rounding caps the accuracy instead of destroying it.
  for (int n : {10, 12, 16}) CHECK(std::abs(gwr([](double q) { return 1.0 / (q + 1.0); }, 1.0, n) - std::exp(-1.0)) < 1e-6);
  // Higher powers: method error of order 1e-6 at n = 8.
  CHECK(std::abs(gwr([](double q) { return 1.0 / (q * q * q); }, 1.0, 8) - 0.5) < 1e-5);
  CHECK(std::abs(gwr([](double q) { return 1.0 / (q * q * q * q); }, 1.0, 8) - 1.0 / 6.0) < 1e-5);
  CHECK(std::abs(gwr([](double q) { return 2.0 / q - 3.0 / (q * q); }, 1.5, 8) - (2.0 - 4.5)) < 1e-6);
}

TEST_CASE("extended precision GWR") {
  auto F = [](double q) { return 1.0 / (q + 1.0); };
  CHECK(std::abs(gwr(F, 1.0, 8, true) - std::exp(-1.0)) < 1e-6);
  std::vector<Mp> s;
  for (int k = 1; k <= 32; ++k) s.push_back(Mp(1) / (Mp(k) * log(Mp(2)) + 1));
  CHECK(std::abs(gwr_invert(s, 1.0, 16).value - std::exp(-1.0)) < 1e-10);
  CHECK(error_kind([&] { gwr_invert(std::vector<double>(36, 1.0), 1.0, 18); }) == ErrorKind::Plan);
}

TEST_CASE("GWR reports the Gaver sequence") {
  std::vector<double> s;
  for (double q : gwr_nodes(1.0, 8)) s.push_back(1.0 / (q + 1.0));
  auto r = gwr_invert(s, 1.0, 8);
  CHECK(r.gaver.size() == 8);
  CHECK(r.stability >= 0.0);
  // Unaccelerated Gaver functionals converge like 1/n.
  CHECK(std::abs(r.gaver.back() - std::exp(-1.0)) < 0.2 / 8);
}

TEST_CASE("sinh-Bromwich on known pairs") {
  CHECK(std::abs(sinh_inv([](cplx q) { return 1.0 / (q + 1.0); }, 1.0) - std::exp(-1.0)) < 1e-10);
  for (double tau : {0.3, 1.0, 4.0}) CHECK(std::abs(sinh_inv([](cplx q) { return 1.0 / q; }, tau) - 1.0) < 1e-10);
  CHECK(std::abs(sinh_inv([](cplx q) { return 1.0 / (q * q); }, 2.0) - 2.0) < 1e-10);
}

TEST_CASE("sinh nodes stay in the sector") {
  SinhPlan p;
  p.tau = 0.5;
  auto nodes = sinh_nodes(p);
  CHECK(nodes.size() >= static_cast<std::size_t>(p.nodes));
  for (const auto& n : nodes) CHECK(std::abs(std::arg(n.q)) < p.gamma);
  p.gamma = 0.5 * M_PI;
  CHECK(error_kind([&] { sinh_nodes(p); }) == ErrorKind::Plan);
  p.gamma = 0.9 * M_PI;
  p.tau = -1.0;
  CHECK(error_kind([&] { sinh_nodes(p); }).has_value());
}

TEST_CASE("sinh error falls at least linearly in log scale with the node count") {
  auto F = [](cplx q) { return 1.0 / (q + 1.0) + 1.0 / ((q + 0.5) * (q + 0.5) + 4.0); };
  const double exact = std::exp(-1.0) + std::exp(-0.5) * std::sin(2.0) / 2.0;
  double e10 = std::abs(sinh_inv(F, 1.0, 10) - exact);
  double e20 = std::abs(sinh_inv(F, 1.0, 20) - exact);
  double e40 = std::abs(sinh_inv(F, 1.0, 40) - exact);
  CHECK(e20 < e10);
  CHECK(e40 < 1e-10);
  CHECK(std::log(e20) - std::log(e10) < -2.0);
}
