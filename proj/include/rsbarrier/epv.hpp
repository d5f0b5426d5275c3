#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rsbarrier/aligned.hpp"
#include "rsbarrier/dual_grid.hpp"
#include "rsbarrier/wiener_hopf.hpp"

namespace rsb {

// u(x_i) = residual[i] + (i >= ref ? above : below)
struct SampledFunction {
  cplx below = 0.0;
  cplx above = 0.0;
  std::size_t ref = 0;
  CVector residual;

  std::size_t size() const { return residual.size(); }
  cplx at(std::size_t i) const { return residual[i] + (i >= ref ? above : below); }
  CVector values() const;
  double sup_norm() const;
  // Same function with the far-field step moved to `new_ref`.
  SampledFunction rebased(std::size_t new_ref) const;

  static SampledFunction zero(std::size_t M, std::size_t ref = 0);
  static SampledFunction constant(std::size_t M, cplx c);
  static SampledFunction step(std::size_t M, std::size_t ref, cplx below, cplx above);
  static SampledFunction from_values(const CVector& v, std::size_t ref, cplx below, cplx above);
};

// y += a * x
void axpy(SampledFunction& y, cplx a, const SampledFunction& x);
// max_i |a(x_i) - b(x_i)|
double sup_distance(const SampledFunction& a, const SampledFunction& b);

enum class Region { BelowUpper, AboveLower, AtOrAboveUpper, AtOrBelowLower };

// Multiplication by the half-line indicator of `region`. Barriers sit on
// cell edges, so "below h+" and "at or above h+" are exact complements.
SampledFunction indicator_multiply(const SampledFunction& u, Region region, const DualGrid& grid);

enum class EpvScheme {
  Auto,      // cell masses for rational models, sampled symbols otherwise
  CellMass,  // exact cell masses of the sup/inf law (rational models only)
  Spectral,  // sampled Wiener-Hopf symbols
  // One-sided discrete factors of the sampled symbol Q/(Q+psi), split through
  // the Fourier coefficients of its logarithm (non-rational models).
  DiscreteFactor,
};

struct EpvOptions {
  EpvScheme scheme = EpvScheme::Auto;
  double damping_plus = 0.0;
  double damping_minus = 0.0;
  // Relative size of residual samples tolerated at the grid ends.
  double decay_tol = 1e-6;
  // Absolute scale below which functions are judged against the floor
  // rather than their own size (late series terms are tiny).
  double scale_floor = 1e-300;
  // Relative size tolerated at the grid ends after an inverse application.
  double growth_tol = 1e-2;
  // Blend sampled symbols into their Nyquist value above half the band.
  bool nyquist_taper = true;
};

// E+ and E- for one regime and one spectral value, realised as discrete
// multipliers on the dual grid. Constants are handled exactly through the
// far-field split; residuals are transformed.
class EpvOperators {
 public:
  EpvOperators(const WHFactorization& factors, const DualGrid& grid, const EpvOptions& opt = {});

  SampledFunction apply(Side side, const SampledFunction& u) const;
  SampledFunction apply_inverse(Side side, const SampledFunction& u) const;
  // Multiplier Q/(Q+psi) sampled on the grid (spectral; used to check E = E+ E-).
  SampledFunction apply_symbol(const SampledFunction& u) const;

  EpvScheme scheme() const { return scheme_; }
  const DualGrid& grid() const { return grid_; }
  cplx Q() const { return Q_; }
  // Discrete symbol of one side on the grid frequencies (undamped).
  const CVector& discrete_symbol(Side side) const { return side_(side).symbol; }
  // Most negative kernel weight relative to total (0 for cell masses, real Q).
  double kernel_undershoot(Side side) const;

 private:
  struct SideData {
    double omega = 0.0;
    // Correlation kernel k_l, l in [-M/2, M/2): (E u)_i = sum_l k_l u_{i+l}.
    std::vector<cplx> kernel;
    // tail[n + M/2] = sum_{l >= n} k_l for n in [-M/2, M/2].
    std::vector<cplx> tail;
    CVector symbol;         // length M, damped
    CVector inv_symbol;     // length P (2M for cell masses, M otherwise), damped
    CVector inv_symbol_undamped;
    CVector e_lower, e_upper;  // inverse step corrections at the barrier edges
  };

  const SideData& side_(Side s) const { return s == Side::Plus ? plus_ : minus_; }
  cplx tail_at(const SideData& d, long long n) const;
  void build_side(Side side, const WHFactorization& f, double omega,
                  const std::vector<cplx>* one_sided);
  // Weights w_n, n in [0, M/2), of both discrete factors; plus acts on
  // u_{i+n}, minus on u_{i-n}.
  std::pair<std::vector<cplx>, std::vector<cplx>> discrete_factors(const CVector& symbol) const;
  CVector step_correction(const SideData& d, std::size_t ref) const;
  void convolve(CVector& r, const CVector& symbol, double omega, std::size_t P) const;

  DualGrid grid_;
  EpvScheme scheme_;
  EpvOptions opt_;
  cplx Q_;
  bool real_q_;
  CVector full_symbol_;
  SideData plus_, minus_;
};

}  // namespace rsb
