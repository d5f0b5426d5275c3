#include "rsbarrier/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "rsbarrier/errors.hpp"
#include "rsbarrier/parallel.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "cli_config";

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Prices every node once; pricer threads get whatever the node pool leaves.
std::vector<PricerResult> evaluate_nodes(const BarrierProblem& problem, PricerOptions opt,
                                         const std::vector<cplx>& qs, int threads,
                                         const std::string& context) {
  const int node_threads = std::max(1, std::min<int>(threads, static_cast<int>(qs.size())));
  opt.threads = std::max(1, threads / node_threads);
  Pricer pricer(problem, opt);
  std::vector<std::optional<PricerResult>> out(qs.size());
  parallel_for(qs.size(), node_threads, [&](std::size_t k) {
    try {
      out[k] = pricer.price_tilde(qs[k]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.detail() << " [node " << k << ", q = " << qs[k] << ", " << context << "]";
      throw Error(e.kind(), e.module(), os.str());
    }
  });
  std::vector<PricerResult> res;
  res.reserve(out.size());
  for (auto& r : out) res.push_back(std::move(*r));
  return res;
}

}  // namespace

std::string history_label(const HistoryIndex& h) {
  std::string s;
  for (std::size_t i = 0; i < h.labels.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(h.labels[i]);
  }
  return s;
}

PriceReport run_price(const ProblemConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  const BarrierProblem problem = build_problem(cfg);
  const PricerOptions opt = build_pricer_options(cfg);
  const int threads = resolved_threads(cfg);
  const std::size_t initial = encode(problem.initial, problem.chain.m());
  const double T = problem.maturity;
  const std::string context = "initial history " + history_label(problem.initial);

  PriceReport rep;
  std::vector<cplx> qs;
  std::vector<SinhNode> sinh;
  if (cfg.inversion.backend == InversionBackend::GWR) {
    for (double q : gwr_nodes(T, cfg.inversion.nG)) qs.emplace_back(q, 0.0);
  } else {
    SinhPlan plan;
    plan.tau = T;
    plan.sigma0 = cfg.inversion.sigma0;
    plan.gamma = cfg.inversion.gamma;
    plan.nodes = cfg.inversion.nodes;
    sinh = sinh_nodes(plan);
    for (const auto& n : sinh) qs.push_back(n.q);
  }
  // Validates the plan before any pricing work.
  if (cfg.inversion.backend == InversionBackend::GWR) {
    gwr_invert(std::vector<double>(qs.size(), 0.0), T, cfg.inversion.nG, cfg.inversion.extended);
  }
  rep.nodes = evaluate_nodes(problem, opt, qs, threads, context);
  rep.outside_band = rep.nodes.front().outside_band;

  const std::size_t n = problem.chain.size();
  int outer = 0, sweeps = 0;
  for (const auto& r : rep.nodes) {
    outer = std::max(outer, static_cast<int>(r.diag.term_norms.size()));
    sweeps = std::max(sweeps, r.diag.max_sweeps);
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t h = 0; h < n; ++h) {
    if (!cfg.all_histories && h != initial) continue;
    PriceRow row;
    row.code = h;
    row.history = history_label(problem.chain.history(h));
    if (!rep.outside_band) {
      if (cfg.inversion.backend == InversionBackend::GWR) {
        std::vector<double> s;
        for (const auto& r : rep.nodes) s.push_back(r.at_spot[h].real());
        row.price = gwr_invert(s, T, cfg.inversion.nG, cfg.inversion.extended).value;
      } else {
        std::vector<cplx> v;
        for (const auto& r : rep.nodes) v.push_back(r.at_spot[h]);
        row.price = sinh_combine(sinh, v).value;
      }
    }
    row.backend = cfg.inversion.backend == InversionBackend::GWR ? "gwr" : "sinh";
    row.terms = cfg.inversion.backend == InversionBackend::GWR ? cfg.inversion.nG
                                                               : cfg.inversion.nodes;
    row.outer_terms = outer;
    row.max_sweeps = sweeps;
    row.wall_time = wall;
    rep.rows.push_back(row);
  }
  return rep;
}

void write_price_csv(const PriceReport& report, std::ostream& os, bool timing) {
  os << "history_code,history,price,backend,terms,outer_terms,max_inner_sweeps,wall_time_s\n";
  for (const auto& r : report.rows) {
    os << r.code << ',' << r.history << ',' << fmt(r.price) << ',' << r.backend << ','
       << r.terms << ',' << r.outer_terms << ',' << r.max_sweeps << ','
       << (timing ? fmt(r.wall_time) : std::string("0")) << '\n';
  }
}

std::vector<ConvergenceRow> run_convergence(const ProblemConfig& cfg, const std::string& parameter,
                                            const std::vector<double>& ladder) {
  if (ladder.empty()) fail(ErrorKind::Config, kModule, "empty parameter ladder");
  std::vector<ConvergenceRow> rows;
  for (double v : ladder) {
    ProblemConfig c = cfg;
    c.all_histories = false;
    if (parameter == "M") {
      c.grid.M = static_cast<std::size_t>(v);
    } else if (parameter == "nG") {
      c.inversion.nG = static_cast<int>(v);
    } else if (parameter == "tolOuter") {
      c.tol_outer = v;
    } else if (parameter == "N") {
      c.N = static_cast<int>(v);
      std::vector<int> h{cfg.initial_history.front()};
      for (int k = 1; k <= c.N; ++k) {
        int want = k < static_cast<int>(cfg.initial_history.size()) ? cfg.initial_history[k] : 0;
        if (want == 0 || want == h.back()) want = h.back() == 1 ? 2 : 1;
        h.push_back(want);
      }
      c.initial_history = h;
    } else {
      fail(ErrorKind::Config, kModule, "unknown convergence parameter '" + parameter + "'");
    }
    PriceReport rep = run_price(c);
    ConvergenceRow row;
    row.value = v;
    row.price = rep.rows.front().price;
    row.diff = rows.empty() ? 0.0 : row.price - rows.back().price;
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(const std::string& parameter, const std::vector<ConvergenceRow>& rows,
                           std::ostream& os) {
  os << parameter << ",price,diff\n";
  for (const auto& r : rows) os << fmt(r.value) << ',' << fmt(r.price) << ',' << fmt(r.diff) << '\n';
}

}  // namespace rsb
