#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "rsbarrier/config.hpp"
#include "rsbarrier/errors.hpp"
#include "rsbarrier/orchestrator.hpp"
#include "rsbarrier/wiener_hopf.hpp"

using namespace rsb;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  long long seed = -1;
  std::string backend;
  bool no_timing = false;
};

ProblemConfig load(const Common& c) {
  ProblemConfig cfg = load_config(c.config);
  if (c.threads > 0) cfg.threads = c.threads;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (c.backend == "gwr") cfg.inversion.backend = InversionBackend::GWR;
  if (c.backend == "sinh") cfg.inversion.backend = InversionBackend::SinhBromwich;
  return cfg;
}

// Writes to --out when given, else stdout.
template <class F>
void emit(const Common& c, F&& write) {
  if (c.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(c.out);
  if (!f) fail(ErrorKind::Config, "cli_config", "cannot write '" + c.out + "'");
  write(f);
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void invert_demo(std::ostream& os) {
  struct Pair {
    const char* name;
    double tau;
    double exact;
    std::function<cplx(cplx)> F;
  };
  std::vector<Pair> pairs = {
      {"1/q", 1.0, 1.0, [](cplx q) { return 1.0 / q; }},
      {"1/(q+1)", 1.0, std::exp(-1.0), [](cplx q) { return 1.0 / (q + 1.0); }},
      {"1/q^2", 2.0, 2.0, [](cplx q) { return 1.0 / (q * q); }},
  };
  os << "pair,tau,backend,param,value,exact,abs_error\n";
  for (const auto& p : pairs) {
    for (int n : {4, 6, 8, 10}) {
      std::vector<double> s;
      for (double q : gwr_nodes(p.tau, n)) s.push_back(p.F(q).real());
      double v = gwr_invert(s, p.tau, n).value;
      os << p.name << ',' << p.tau << ",gwr," << n << ',' << num(v) << ',' << num(p.exact) << ','
         << num(std::abs(v - p.exact)) << '\n';
    }
    for (int n : {10, 20, 40}) {
      SinhPlan plan;
      plan.tau = p.tau;
      plan.nodes = n;
      double v = sinh_bromwich_invert(p.F, plan).value;
      os << p.name << ',' << p.tau << ",sinh," << n << ',' << num(v) << ',' << num(p.exact) << ','
         << num(std::abs(v - p.exact)) << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-barrier knock-out pricing under regime switching with memory"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "JSON problem configuration");
    if (needs_config) opt->required();
    sub->add_option("--out", c.out, "output CSV path (default stdout)");
    sub->add_option("--threads", c.threads, "worker threads (overrides config and RSB_THREADS)");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--backend", c.backend, "inversion back end")
        ->check(CLI::IsMember({"gwr", "sinh"}));
  };

  auto* price = app.add_subcommand("price", "price the configured contract");
  add_common(price, true);
  price->add_flag("--no-timing", c.no_timing, "print 0 in the wall-time column");

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of the configured contract");
  add_common(mc, true);
  mc->add_flag("--no-timing", c.no_timing, "print 0 in the wall-time column");

  auto* factors = app.add_subcommand("factors", "dump Wiener-Hopf factors on the grid");
  add_common(factors, true);
  int regime = 1;
  double q_re = 1.0, q_im = 0.0;
  factors->add_option("--regime", regime, "regime label (1-based)");
  factors->add_option("--q", q_re, "real part of the spectral value Q");
  factors->add_option("--q-imag", q_im, "imaginary part of Q");

  auto* demo = app.add_subcommand("invert-demo", "known transform pairs through both back ends");
  add_common(demo, false);

  auto* conv = app.add_subcommand("convergence", "self-convergence table over a parameter ladder");
  add_common(conv, true);
  std::string param = "M";
  std::vector<double> ladder;
  conv->add_option("--param", param, "M | nG | tolOuter | N")
      ->check(CLI::IsMember({"M", "nG", "tolOuter", "N"}));
  conv->add_option("--values", ladder, "ladder values")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*price) {
      ProblemConfig cfg = load(c);
      PriceReport rep = run_price(cfg);
      if (rep.outside_band) std::cerr << "warning: spot outside the band, price is 0\n";
      emit(c, [&](std::ostream& os) { write_price_csv(rep, os, !c.no_timing); });
    } else if (*mc) {
      ProblemConfig cfg = load(c);
      auto t0 = std::chrono::steady_clock::now();
      McResult r = simulate_price(build_problem(cfg), build_mc_config(cfg));
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      emit(c, [&](std::ostream& os) {
        os << "estimate,stderr,paths,dt,seed,wall_time_s\n"
           << num(r.estimate) << ',' << num(r.stderr_) << ',' << r.paths << ',' << num(cfg.mc.dt)
           << ',' << cfg.seed << ',' << (c.no_timing ? std::string("0") : num(wall)) << '\n';
      });
    } else if (*factors) {
      ProblemConfig cfg = load(c);
      if (regime < 1 || regime > cfg.m) {
        fail(ErrorKind::Config, "cli_config", "regime label out of range");
      }
      DualGrid grid = DualGrid::for_band(cfg.lower, cfg.upper, cfg.grid);
      const LevyModel& model = cfg.regimes[static_cast<std::size_t>(regime - 1)].model;
      cplx Q(q_re, q_im);
      WHFactorization f = factorize(model, Q, grid);
      emit(c, [&](std::ostream& os) {
        os << "xi,re_phi_plus,im_phi_plus,re_phi_minus,im_phi_minus,residual\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
          double xi = grid.xi(k);
          cplx prod = f.phi_plus[k] * f.phi_minus[k] * (Q + char_exponent(model, xi)) / Q;
          os << num(xi) << ',' << num(f.phi_plus[k].real()) << ',' << num(f.phi_plus[k].imag())
             << ',' << num(f.phi_minus[k].real()) << ',' << num(f.phi_minus[k].imag()) << ','
             << num(std::abs(prod - 1.0)) << '\n';
        }
      });
    } else if (*demo) {
      emit(c, [&](std::ostream& os) { invert_demo(os); });
    } else if (*conv) {
      ProblemConfig cfg = load(c);
      auto rows = run_convergence(cfg, param, ladder);
      emit(c, [&](std::ostream& os) { write_convergence_csv(param, rows, os); });
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_config_error() ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
