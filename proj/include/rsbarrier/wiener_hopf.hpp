#pragma once

#include <memory>
#include <vector>

#include "rsbarrier/aligned.hpp"
#include "rsbarrier/dual_grid.hpp"
#include "rsbarrier/levy_model.hpp"

namespace rsb {

enum class Side { Plus, Minus };

// Exponential-mixture law of the supremum (Plus) or minus the infimum (Minus)
// at an exponential time, for rational models:
//   phi(xi) = a0 + sum_j a_j beta_j / (beta_j -/+ i xi)
// i.e. an atom a0 at zero plus density sum_j a_j beta_j exp(-beta_j y), y > 0.
struct MixtureLaw {
  cplx a0 = 0.0;
  std::vector<cplx> a;
  std::vector<cplx> beta;
  // P(Y > y) for y >= 0.
  cplx tail(double y) const;
};

struct WHFactorization {
  LevyModel model = LevyModel::brownian(0.0, 1.0);
  cplx Q = 1.0;
  bool rational = false;

  // Rational data. Roots of Q + psi: xi = -i beta for beta in beta_plus (lower
  // half-plane), xi = +i beta for beta in beta_minus (upper half-plane).
  std::vector<cplx> beta_plus, beta_minus;
  std::vector<double> zeros_plus, zeros_minus;  // Kou tail rates carried by each factor
  MixtureLaw law_plus, law_minus;

  // Samples on the dual grid frequencies (FFT order).
  CVector phi_plus, phi_minus, symbol;

  // Quadrature lines used by the integral route.
  double line_plus = 0.0, line_minus = 0.0;

  // Closed form for rational factors; throws for integral ones.
  cplx phi(Side side, cplx xi) const;
  // max_k |phi+ phi- (Q + psi) / Q - 1| on the grid.
  double product_residual() const;
};

WHFactorization factorize_rational(const LevyModel& model, cplx Q, const DualGrid& grid);

struct IntegralOptions {
  // Quadrature step is |distance to line| * 2 pi / steps_per_distance.
  double steps_per_distance = 36.0;
  int laguerre_nodes = 60;
  // Evaluate on xi_k + i*shift instead of the real axis.
  double shift = 0.0;
  // Initial distance between the evaluation line and each quadrature line;
  // 0 selects the strip safety margin. Halved until the winding check passes.
  double distance = 0.0;
  int max_halvings = 8;
};

WHFactorization factorize_integral(const LevyModel& model, cplx Q, const DualGrid& grid,
                                   const IntegralOptions& opt = {});

// Rational for Brownian/Kou, integral otherwise.
WHFactorization factorize(const LevyModel& model, cplx Q, const DualGrid& grid);

// Factors sampled on xi_k + i*shift (used by damped applications).
CVector factor_on_line(const WHFactorization& f, const DualGrid& grid, Side side, double shift);

}  // namespace rsb
