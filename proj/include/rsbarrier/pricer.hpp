#pragma once

#include <cstddef>
#include <vector>

#include "rsbarrier/dual_grid.hpp"
#include "rsbarrier/epv.hpp"
#include "rsbarrier/history_space.hpp"
#include "rsbarrier/levy_model.hpp"

namespace rsb {

struct Regime {
  LevyModel model = LevyModel::brownian(0.0, 1.0);
  double r = 0.0;  // discount rate
  double G = 1.0;  // terminal payoff
};

struct BarrierProblem {
  std::vector<Regime> regimes;
  MemoryChain chain = MemoryChain::trivial();
  double lower = -1.0;
  double upper = 1.0;
  double spot = 0.0;
  double maturity = 1.0;
  HistoryIndex initial{{1}};
};

struct PricerOptions {
  GridOptions grid;
  EpvOptions epv;
  // Relative to scale = max |G| / |q|.
  double tol_inner = 1e-10;
  double tol_outer = 1e-8;
  double outside_tol = 1e-6;
  int max_terms = 200;
  int max_sweeps = 500;
  int threads = 1;
  // Keep the assembled value functions in the result.
  bool keep_field = false;
};

// Per inner iteration: sweeps used and sup-norm of successive differences.
struct InnerStats {
  int sweeps = 0;
  std::vector<double> diffs;
  // Largest ratio diffs[n] / diffs[n-1] over differences above the noise floor.
  double max_ratio = 0.0;
  // Most negative pointwise increment Re(new - old), relative to scale (real q).
  double min_increment = 0.0;
};

struct PricerDiagnostics {
  std::vector<double> term_norms;  // sup over histories of |V+;l + V-;l|
  std::vector<InnerStats> inner;   // plus and minus iterations, in order
  int max_sweeps = 0;
  double max_ratio = 0.0;
  double min_increment = 0.0;
  double contraction_bound = 0.0;  // Lambda0 / |q + Lambda0 + min r|
  double max_outside = 0.0;        // sup |V| outside the band, relative to scale
};

struct PricerResult {
  cplx q;
  std::vector<cplx> v0;       // per history code
  std::vector<cplx> at_spot;  // V~_h(q, x0) per history code
  bool outside_band = false;
  PricerDiagnostics diag;
  std::vector<SampledFunction> field;  // V~_h on the grid when requested
};

// Q_h V0_h = G_{h0} + sum_s lambda_{s,h} V0_{(s,h')}
std::vector<cplx> solve_v0(const MemoryChain& chain, const std::vector<double>& r,
                           const std::vector<double>& G, cplx q);

class Pricer {
 public:
  Pricer(BarrierProblem problem, PricerOptions opt = {});

  const BarrierProblem& problem() const { return problem_; }
  const PricerOptions& options() const { return opt_; }
  const DualGrid& grid() const { return grid_; }

  PricerResult price_tilde(cplx q) const;

  // Building blocks, exposed for tests.
  // One operator set per regime label (index s-1), at Q(s; q).
  std::vector<EpvOperators> operators(cplx q) const;
  // Limit of the plus (resp. minus) inner iteration driven by `prev`, the
  // previous term of the opposite side.
  std::vector<SampledFunction> inner_iteration(Side side, const std::vector<SampledFunction>& prev,
                                               const std::vector<EpvOperators>& ops, cplx q,
                                               InnerStats* stats = nullptr) const;
  // Boundary term E+ 1_[h+,inf) (E+)^-1 g, or its mirror at h-.
  SampledFunction boundary_term(Side side, const EpvOperators& ops, const SampledFunction& g) const;
  // One Jacobi sweep of the inner iteration.
  std::vector<SampledFunction> sweep(Side side, const std::vector<SampledFunction>& current,
                                     const std::vector<SampledFunction>& boundary,
                                     const std::vector<EpvOperators>& ops) const;
  // V~1 = sum_l (-1)^l (V+;l + V-;l).
  std::vector<SampledFunction> outer_series(const std::vector<EpvOperators>& ops, cplx q,
                                            const std::vector<cplx>& v0,
                                            PricerDiagnostics& diag) const;

  // Cubic interpolation at x from the samples inside the band.
  cplx interpolate(const SampledFunction& u, double x) const;

 private:
  double scale(cplx q) const;

  BarrierProblem problem_;
  PricerOptions opt_;
  DualGrid grid_;
  std::vector<double> r_, G_;
};

}  // namespace rsb
