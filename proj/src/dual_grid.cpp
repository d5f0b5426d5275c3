#include "rsbarrier/dual_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rsbarrier/errors.hpp"

namespace rsb {

DualGrid DualGrid::for_band(double lower, double upper, const GridOptions& opt) {
  constexpr const char* kModule = "epv_operators";
  if (!(lower < upper)) fail(ErrorKind::Config, kModule, "need h- < h+");
  if (opt.M < 64 || (opt.M & (opt.M - 1)) != 0) {
    fail(ErrorKind::Config, kModule, "M must be a power of two >= 64");
  }
  if (!(opt.domain_factor > 0.0)) fail(ErrorKind::Config, kModule, "domain factor must be > 0");
  DualGrid g;
  g.M_ = opt.M;
  double L = upper - lower;
  auto cells_in_band = static_cast<std::size_t>(
      std::lround(static_cast<double>(opt.M) / (1.0 + 2.0 * opt.domain_factor)));
  if (cells_in_band < 8 || cells_in_band >= opt.M) {
    fail(ErrorKind::Grid, kModule,
         "band resolved by " + std::to_string(cells_in_band) + " cells; increase M");
  }
  g.dx_ = L / static_cast<double>(cells_in_band);
  g.lower_edge_ = (opt.M - cells_in_band) / 2;
  g.upper_edge_ = g.lower_edge_ + cells_in_band;
  g.x_min_ = lower - static_cast<double>(g.lower_edge_) * g.dx_;
  g.snap_ = std::max(std::abs(g.lower() - lower), std::abs(g.upper() - upper));
  return g;
}

double DualGrid::dxi() const {
  return 2.0 * std::numbers::pi / (static_cast<double>(M_) * dx_);
}

double DualGrid::xi(std::size_t k) const {
  auto kk = static_cast<long long>(k);
  auto m = static_cast<long long>(M_);
  if (kk >= m / 2) kk -= m;
  return static_cast<double>(kk) * dxi();
}

}  // namespace rsb
