#include "rsbarrier/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

#include "rsbarrier/errors.hpp"
#include "rsbarrier/parallel.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "mc_oracle";
constexpr std::size_t kChunk = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RegimeDyn {
  double mu, sigma, lambdaJ, p, alphaPlus, alphaMinus;
};

RegimeDyn dynamics(const LevyModel& m) {
  if (const auto* b = std::get_if<BrownianDrift>(&m.params())) {
    return {b->mu, std::sqrt(b->sigma2), 0.0, 0.5, 1.0, 1.0};
  }
  if (const auto* k = std::get_if<KouJumpDiffusion>(&m.params())) {
    return {k->mu, std::sqrt(k->sigma2), k->lambdaJ, k->p, k->alphaPlus, k->alphaMinus};
  }
  fail(ErrorKind::Config, kModule, "KoBoL paths are not simulated by the oracle");
}

struct PathSim {
  const BarrierProblem& pb;
  const McConfig& cfg;
  std::vector<RegimeDyn> dyn;
  std::size_t start_code;

  // Bridge survival of the diffusion piece from a to b over time d.
  double bridge_survival(double a, double b, double var) const {
    if (var <= 0.0) return 1.0;
    double up = (pb.upper - a) * (pb.upper - b);
    double dn = (a - pb.lower) * (b - pb.lower);
    double p = 0.0;
    if (up < 25.0 * var) p += std::exp(-2.0 * up / var);
    if (dn < 25.0 * var) p += std::exp(-2.0 * dn / var);
    return std::max(0.0, 1.0 - p);
  }

  double run(PathRng& rng) const {
    const MemoryChain& chain = pb.chain;
    const double T = pb.maturity, dt = cfg.dt;
    std::size_t h = start_code;
    double x = pb.spot, t = 0.0, disc = 0.0, w = 1.0;
    while (true) {
      int j = chain.current_regime(h);
      const RegimeDyn& d = dyn[static_cast<std::size_t>(j - 1)];
      double Lh = chain.lambda_h(h);
      double end = Lh > 0.0 ? t + rng.exponential(Lh) : kInf;
      bool switches = end < T;
      end = std::min(end, T);
      disc += pb.regimes[static_cast<std::size_t>(j - 1)].r * (end - t);
      double next_jump = d.lambdaJ > 0.0 ? t + rng.exponential(d.lambdaJ) : kInf;
      while (t < end) {
        // Next monitoring time on the global grid k * dt.
        double grid_t = (std::floor(t / dt + 1e-9) + 1.0) * dt;
        double stop = std::min({grid_t, end, next_jump});
        double step = stop - t;
        double a = x;
        x += d.mu * step + d.sigma * std::sqrt(step) * rng.normal();
        t = stop;
        if (x <= pb.lower || x >= pb.upper) return 0.0;
        if (cfg.bridge) w *= bridge_survival(a, x, d.sigma * d.sigma * step);
        if (t == next_jump) {
          x += rng.uniform() < d.p ? rng.exponential(d.alphaPlus) : -rng.exponential(d.alphaMinus);
          if (x <= pb.lower || x >= pb.upper) return 0.0;
          next_jump = t + rng.exponential(d.lambdaJ);
        }
      }
      if (!switches) break;
      // Target state s with probability lambda_{s,h} / Lambda_h, ascending s.
      double u = rng.uniform() * Lh, acc = 0.0;
      int target = 0;
      for (int s = 1; s <= chain.m(); ++s) {
        if (s == j) continue;
        acc += chain.rate(h, s);
        if (chain.rate(h, s) > 0.0) target = s;
        if (u < acc) break;
      }
      h = chain.next(h, target);
    }
    double G = pb.regimes[static_cast<std::size_t>(chain.current_regime(h) - 1)].G;
    return G * std::exp(-disc) * w;
  }
};

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) : key_(mix(mix(seed) ^ path)) {}

std::uint64_t PathRng::next_u64() { return mix(key_ + ++counter_ * 0xd1b54a32d192ed03ULL); }

double PathRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double PathRng::exponential(double rate) { return -std::log(uniform()) / rate; }

double PathRng::normal() {
  double z;
  if (has_spare_) {
    has_spare_ = false;
    z = spare_;
  } else {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    z = u * f;
  }
  return negate_ ? -z : z;
}

McResult simulate_price(const BarrierProblem& pb, const McConfig& cfg) {
  if (cfg.paths < 1000) fail(ErrorKind::Config, kModule, "at least 1000 paths are required");
  if (!(cfg.dt > 0.0 && cfg.dt <= pb.maturity / 10.0)) {
    fail(ErrorKind::Config, kModule, "time step must satisfy 0 < dt <= T/10");
  }
  if (pb.regimes.size() != static_cast<std::size_t>(pb.chain.m())) {
    fail(ErrorKind::Config, kModule, "regime count does not match the chain");
  }
  McResult res;
  res.paths = cfg.paths;
  if (!(pb.spot > pb.lower && pb.spot < pb.upper)) return res;

  PathSim sim{pb, cfg, {}, encode(pb.initial, pb.chain.m())};
  for (const auto& reg : pb.regimes) sim.dyn.push_back(dynamics(reg.model));

  // Samples are single paths, or antithetic pair means.
  const std::size_t samples = cfg.antithetic ? (cfg.paths + 1) / 2 : cfg.paths;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks, 0.0), sum2(chunks, 0.0);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    std::size_t lo = c * kChunk, hi = std::min(samples, lo + kChunk);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      double v;
      if (cfg.antithetic) {
        PathRng r1(cfg.seed, i), r2(cfg.seed, i);
        r2.negate_normals(true);
        v = 0.5 * (sim.run(r1) + sim.run(r2));
      } else {
        PathRng r(cfg.seed, i);
        v = sim.run(r);
      }
      s += v;
      s2 += v * v;
    }
    sum[c] = s;
    sum2[c] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sum2[c];
  }
  double n = static_cast<double>(samples);
  double mean = s / n;
  double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
  res.estimate = mean;
  res.stderr_ = std::sqrt(var / n);
  return res;
}

SeriesResult brownian_band_series(double sigma2, double mu, double r, double lower, double upper,
                                  double x0, double T, int terms) {
  if (terms < 1) fail(ErrorKind::Config, kModule, "series needs at least one term");
  if (!(sigma2 > 0.0)) fail(ErrorKind::Config, kModule, "series needs sigma2 > 0");
  SeriesResult res;
  if (!(x0 > lower && x0 < upper)) return res;
  constexpr double pi = std::numbers::pi;
  const double L = upper - lower;
  const double a = mu / sigma2;
  const double y = x0 - lower;
  const double pref = std::exp(-r * T - a * y - mu * mu / (2.0 * sigma2) * T);
  const double eaL = std::exp(a * L);
  auto term = [&](int k) {
    double kk = k * pi / L;
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double coef = (2.0 / L) * kk * (1.0 - sign * eaL) / (a * a + kk * kk);
    return coef * std::sin(kk * y) * std::exp(-0.5 * sigma2 * kk * kk * T);
  };
  double acc = 0.0;
  for (int k = 1; k <= terms; ++k) acc += term(k);
  res.value = pref * acc;
  res.next_term = std::abs(pref * term(terms + 1));
  return res;
}

}  // namespace rsb
