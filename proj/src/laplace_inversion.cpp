#include "rsbarrier/laplace_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rsbarrier/errors.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "laplace_inversion";

void check_gwr(double tau, int n, int max_n) {
  if (!(tau > 0.0)) fail(ErrorKind::Plan, kModule, "GWR needs tau > 0");
  if (n < 4 || n % 2 != 0 || n > max_n) {
    fail(ErrorKind::Plan, kModule,
         "GWR term count must be even and in [4, " + std::to_string(max_n) + "], got " +
             std::to_string(n));
  }
}

template <class Real>
Real binomial(int n, int k) {
  Real c = 1;
  for (int i = 1; i <= k; ++i) c = c * Real(n - k + i) / Real(i);
  return c;
}

constexpr double kNoiseCut = 1e-8;

template <class Real>
GwrResult gwr_core(const std::vector<Real>& F, double tau, int n, double sample_eps) {
  using std::abs;
  using boost::multiprecision::abs;
  if (F.size() != static_cast<std::size_t>(2 * n)) {
    fail(ErrorKind::Plan, kModule, "GWR needs 2n samples");
  }
  const Real a = log(Real(2)) / Real(tau);
  std::vector<Real> f(static_cast<std::size_t>(n));
  Real noise = 0;
  std::vector<double> noise_k;
  for (int k = 1; k <= n; ++k) {
    // a (2k)! / (k! (k-1)!) = a k C(2k, k)
    Real coef = a * Real(k) * binomial<Real>(2 * k, k);
    Real sum = 0, mag = 0;
    for (int j = 0; j <= k; ++j) {
      Real term = binomial<Real>(k, j) * F[static_cast<std::size_t>(k + j - 1)];
      sum += (j % 2 == 0) ? term : Real(-term);
      mag += abs(term);
    }
    f[static_cast<std::size_t>(k - 1)] = coef * sum;
    noise = std::max<Real>(noise, coef * mag * Real(sample_eps));
    noise_k.push_back(static_cast<double>(coef * mag * Real(sample_eps)));
  }
  // Functionals drowned in sample rounding are dropped before acceleration.
  std::size_t usable = f.size();
  {
    double size = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      size = std::max(size, static_cast<double>(abs(f[k])));
      if (k >= 3 && noise_k[k] > kNoiseCut * std::max(size, 1e-300)) {
        usable = k;
        break;
      }
    }
  }

  GwrResult res;
  for (const auto& v : f) res.gaver.push_back(static_cast<double>(v));

  // Wynn rho: rho_{-1} = 0, rho_0^(j) = f_{j+1},
  // rho_k^(j) = rho_{k-2}^(j+1) + k / (rho_{k-1}^(j+1) - rho_{k-1}^(j)).
  const int nu = static_cast<int>(usable);
  noise = 0;
  for (std::size_t k = 0; k < usable; ++k) noise = std::max<Real>(noise, Real(noise_k[k]));
  // A flat sequence (F = c/q) is already converged; f_1 carries the least rounding.
  bool flat = true;
  for (std::size_t k = 1; k < usable && flat; ++k) flat = abs(f[k] - f[0]) <= Real(8) * noise;
  if (flat) {
    res.value = static_cast<double>(f[0]);
    return res;
  }
  std::vector<Real> prev(usable + 1, Real(0));
  std::vector<Real> cur(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(usable));
  std::vector<Real> last_row{cur.back()};
  Real best = cur.back();
  const Real floor_abs = Real(1e-30);
  for (int k = 1; k <= nu - 1; ++k) {
    std::size_t len = static_cast<std::size_t>(nu - k);
    std::vector<Real> next(len);
    bool broke = false;
    for (std::size_t j = 0; j < len; ++j) {
      Real d = cur[j + 1] - cur[j];
      // Differences of even-order entries below the rounding level carry no information.
      Real limit = (k - 1) % 2 == 0 ? std::max<Real>(floor_abs, Real(8) * noise) : floor_abs;
      if (abs(d) <= limit) {
        broke = true;
        break;
      }
      next[j] = prev[j + 1] + Real(k) / d;
    }
    if (broke) {
      res.breakdown = true;
      break;
    }
    if (k % 2 == 0) {
      best = next.back();
      last_row.push_back(best);
    }
    prev.swap(cur);
    cur.swap(next);
  }
  res.value = static_cast<double>(best);
  std::size_t m = last_row.size();
  if (m >= 2) {
    auto first = last_row.begin() + static_cast<std::ptrdiff_t>(m >= 3 ? m - 3 : 0);
    auto [lo, hi] = std::minmax_element(first, last_row.end());
    res.stability = static_cast<double>(*hi - *lo);
  }
  return res;
}

}  // namespace

std::vector<double> gwr_nodes(double tau, int n) {
  if (!(tau > 0.0)) fail(ErrorKind::Plan, kModule, "GWR needs tau > 0");
  std::vector<double> q(static_cast<std::size_t>(2 * n));
  for (int k = 1; k <= 2 * n; ++k) q[static_cast<std::size_t>(k - 1)] = k * std::numbers::ln2 / tau;
  return q;
}

GwrResult gwr_invert(const std::vector<double>& samples, double tau, int n, bool extended) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (!extended) {
    check_gwr(tau, n, 16);
    return gwr_core<double>(samples, tau, n, eps);
  }
  check_gwr(tau, n, 22);
  std::vector<Mp> s(samples.begin(), samples.end());
  return gwr_core<Mp>(s, tau, n, eps);
}

GwrResult gwr_invert(const std::vector<Mp>& samples, double tau, int n) {
  check_gwr(tau, n, 22);
  return gwr_core<Mp>(samples, tau, n, 1e-50);
}

std::vector<SinhNode> sinh_nodes(const SinhPlan& plan) {
  constexpr double pi = std::numbers::pi;
  if (!(plan.tau > 0.0)) fail(ErrorKind::Plan, kModule, "sinh contour needs tau > 0");
  if (!(plan.gamma > pi / 2 && plan.gamma < pi)) {
    fail(ErrorKind::Plan, kModule, "sector half-angle must lie in (pi/2, pi)");
  }
  if (plan.nodes < 2) fail(ErrorKind::Plan, kModule, "sinh contour needs at least 2 nodes");
  if (plan.sigma0 < 0.0) fail(ErrorKind::Plan, kModule, "sector apex must be positive");
  const double sigma0 = plan.sigma0 > 0.0 ? plan.sigma0 : std::max(0.5, 2.0 / plan.tau);
  const double omega = 0.5 * (plan.gamma - pi / 2);
  const double b = sigma0;
  const double c = sigma0 + b * std::sin(omega);
  const double Y = std::acosh((std::log(1.0 / plan.eps) / plan.tau + c) / (b * std::sin(omega)));
  const double h = Y / plan.nodes;
  const cplx I(0.0, 1.0);
  std::vector<SinhNode> nodes;
  nodes.reserve(static_cast<std::size_t>(plan.nodes) + 1);
  for (int k = 0; k <= plan.nodes; ++k) {
    double y = k * h;
    cplx z(y, omega);
    cplx q = c + I * b * std::sinh(z);
    if (!(std::abs(std::arg(q)) < plan.gamma)) {
      fail(ErrorKind::Plan, kModule, "contour node " + std::to_string(k) + " leaves the sector");
    }
    // (1/2 pi i) dq = (b / 2 pi) cosh(z) dy; conjugate half doubles the real part.
    cplx w = std::exp(q * plan.tau) * b * std::cosh(z) * (h / pi);
    if (k == 0) w *= 0.5;
    nodes.push_back({q, w});
  }
  return nodes;
}

SinhResult sinh_combine(const std::vector<SinhNode>& nodes, const std::vector<cplx>& values) {
  if (nodes.size() != values.size()) {
    fail(ErrorKind::Internal, kModule, "node and value counts differ");
  }
  cplx acc = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) acc += nodes[k].w * values[k];
  SinhResult r;
  r.value = acc.real();
  r.error_estimate = std::abs(nodes.back().w * values.back());
  return r;
}

SinhResult sinh_bromwich_invert(const std::function<cplx(cplx)>& F, const SinhPlan& plan) {
  std::vector<SinhNode> nodes = sinh_nodes(plan);
  std::vector<cplx> values(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    try {
      values[k] = F(nodes[k].q);
    } catch (const Error& e) {
      throw Error(e.kind(), e.module(),
                  e.detail() + " (contour node " + std::to_string(k) + ")");
    }
  }
  return sinh_combine(nodes, values);
}

}  // namespace rsb
