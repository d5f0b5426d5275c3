#pragma once

#include <cstddef>
#include <cstdint>

#include "rsbarrier/pricer.hpp"

namespace rsb {

struct McConfig {
  std::size_t paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  bool bridge = true;
  bool antithetic = false;
  int threads = 1;
};

struct McResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t paths = 0;
};

// Discounted knock-out payoff E[exp(-int r) G_{h0(T)} 1{no exit}] by simulation
// of the memory chain and the per-regime Brownian/Kou paths.
McResult simulate_price(const BarrierProblem& problem, const McConfig& cfg);

struct SeriesResult {
  double value = 0.0;
  double next_term = 0.0;  // magnitude of the first omitted term
};

// No-exit value of drifted Brownian motion in (lower, upper) by the sine
// expansion, drift removed by the exponential change of measure.
SeriesResult brownian_band_series(double sigma2, double mu, double r, double lower, double upper,
                                  double x0, double T, int terms);

// Counter-style SplitMix64 stream; each path gets its own key.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path);
  std::uint64_t next_u64();
  double uniform();  // in (0, 1)
  double exponential(double rate);
  double normal();
  void negate_normals(bool on) { negate_ = on; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
  bool negate_ = false;
};

}  // namespace rsb
