#pragma once

#include <cstddef>

namespace rsb {

struct GridOptions {
  std::size_t M = 16384;
  // Domain is [h- - f*L, h+ + f*L] with L = h+ - h-.
  double domain_factor = 10.0;
};

// Staggered spatial grid: samples at cell centres x_i = x_min + (i + 1/2) dx,
// i = 0..M-1, and cell edges x_min + j dx. Both barriers sit exactly on cell
// edges (indices lower_edge() and upper_edge()), so "strictly below h+" and
// "at or above h+" select complementary sets of samples. Frequencies follow
// FFT ordering with dx * dxi = 2 pi / M.
class DualGrid {
 public:
  static DualGrid for_band(double lower, double upper, const GridOptions& opt = {});

  std::size_t size() const { return M_; }
  double dx() const { return dx_; }
  double dxi() const;
  double x_min() const { return x_min_; }
  double x(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }
  double edge(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx_; }
  double xi(std::size_t k) const;
  std::size_t lower_edge() const { return lower_edge_; }
  std::size_t upper_edge() const { return upper_edge_; }
  double lower() const { return edge(lower_edge_); }
  double upper() const { return edge(upper_edge_); }
  // Distance between requested and represented barriers (zero by construction).
  double snap_distance() const { return snap_; }
  // Samples whose distance to either grid end is below 10% of the domain.
  std::size_t guard_cells() const { return M_ / 10; }

 private:
  std::size_t M_ = 0;
  double dx_ = 0.0;
  double x_min_ = 0.0;
  std::size_t lower_edge_ = 0;
  std::size_t upper_edge_ = 0;
  double snap_ = 0.0;
};

}  // namespace rsb
