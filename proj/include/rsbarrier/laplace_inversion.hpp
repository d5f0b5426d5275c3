#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <complex>
#include <functional>
#include <vector>

namespace rsb {

using cplx = std::complex<double>;
using Mp = boost::multiprecision::cpp_bin_float_50;

enum class InversionBackend { GWR, SinhBromwich };

// q_k = k ln2 / tau, k = 1..2n
std::vector<double> gwr_nodes(double tau, int n);

struct GwrResult {
  double value = 0.0;
  std::vector<double> gaver;  // Gaver functionals f_1..f_n
  double stability = 0.0;     // spread of the last three even-order rho entries
  bool breakdown = false;     // rho recursion stopped early; value is the last stable entry
};

// samples[k-1] = F(q_k). Double precision needs n even in [4, 16]; `extended`
// runs the Gaver and rho arithmetic in 50 digits (n up to 22).
GwrResult gwr_invert(const std::vector<double>& samples, double tau, int n, bool extended = false);
// Samples already in 50-digit precision.
GwrResult gwr_invert(const std::vector<Mp>& samples, double tau, int n);

struct SinhPlan {
  double tau = 1.0;
  double sigma0 = 0.0;  // 0 selects max(0.5, 2 / tau)
  double gamma = 0.9 * 3.14159265358979323846;
  int nodes = 40;
  double eps = 1e-12;  // truncation level of exp(t Re q)
};

struct SinhNode {
  cplx q;
  cplx w;  // f(tau) = Re sum_k w_k F(q_k)
};

// Contour q(y) = c + i b sinh(y + i omega) with omega = (gamma - pi/2)/2,
// b = sigma0 and c chosen so that q(0) = sigma0. Trapezoid on y in [0, Y],
// conjugate half folded in. Every node lies in the sector |arg q| < gamma.
std::vector<SinhNode> sinh_nodes(const SinhPlan& plan);

struct SinhResult {
  double value = 0.0;
  double error_estimate = 0.0;  // magnitude of the last term
};

SinhResult sinh_combine(const std::vector<SinhNode>& nodes, const std::vector<cplx>& values);
SinhResult sinh_bromwich_invert(const std::function<cplx(cplx)>& F, const SinhPlan& plan);

}  // namespace rsb
