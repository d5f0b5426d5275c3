#include "rsbarrier/config.hpp"

#include <fstream>
#include <variant>

#include "rsbarrier/errors.hpp"
#include "rsbarrier/parallel.hpp"

namespace rsb {

using nlohmann::json;

namespace {

constexpr const char* kModule = "cli_config";

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::Config, kModule, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

const char* scheme_name(EpvScheme s) {
  switch (s) {
    case EpvScheme::CellMass: return "cellMass";
    case EpvScheme::Spectral: return "spectral";
    case EpvScheme::DiscreteFactor: return "discreteFactor";
    default: return "auto";
  }
}

EpvScheme scheme_from(const std::string& s) {
  if (s == "auto") return EpvScheme::Auto;
  if (s == "cellMass") return EpvScheme::CellMass;
  if (s == "spectral") return EpvScheme::Spectral;
  if (s == "discreteFactor") return EpvScheme::DiscreteFactor;
  bad("unknown grid scheme '" + s + "'");
}

bool rule_matches(const RateRule& rule, const HistoryIndex& h, int s) {
  if (rule.s != s || rule.history.size() > h.labels.size()) return false;
  return std::equal(rule.history.begin(), rule.history.end(), h.labels.begin());
}

}  // namespace

json model_to_json(const LevyModel& m) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BrownianDrift>) {
          return {{"type", "brownian"}, {"mu", p.mu}, {"sigma2", p.sigma2}};
        } else if constexpr (std::is_same_v<T, KouJumpDiffusion>) {
          return {{"type", "kou"},          {"mu", p.mu},
                  {"sigma2", p.sigma2},     {"lambdaJ", p.lambdaJ},
                  {"p", p.p},               {"alphaPlus", p.alphaPlus},
                  {"alphaMinus", p.alphaMinus}};
        } else {
          return {{"type", "kobol"},           {"nu", p.nu},
                  {"c", p.c},                  {"lambdaPlus", p.lambdaPlus},
                  {"lambdaMinus", p.lambdaMinus}, {"mu", p.mu}};
        }
      },
      m.params());
}

LevyModel model_from_json(const json& j) {
  std::string type = require<std::string>(j, "type");
  if (type == "brownian") {
    return LevyModel::brownian(get_or(j, "mu", 0.0), require<double>(j, "sigma2"));
  }
  if (type == "kou") {
    return LevyModel::kou(get_or(j, "mu", 0.0), get_or(j, "sigma2", 0.0),
                          get_or(j, "lambdaJ", 0.0), get_or(j, "p", 0.5),
                          require<double>(j, "alphaPlus"), require<double>(j, "alphaMinus"));
  }
  if (type == "kobol") {
    return LevyModel::kobol(require<double>(j, "nu"), require<double>(j, "c"),
                            require<double>(j, "lambdaPlus"), require<double>(j, "lambdaMinus"),
                            get_or(j, "mu", 0.0));
  }
  bad("unknown model type '" + type + "'");
}

ProblemConfig parse_config(const json& j) {
  if (!j.is_object()) bad("configuration must be a JSON object");
  ProblemConfig c;

  const json& regimes = j.contains("regimes") ? j.at("regimes") : json();
  if (!regimes.is_array() || regimes.empty()) bad("'regimes' must be a non-empty array");
  for (const auto& r : regimes) {
    Regime reg;
    reg.model = model_from_json(r.contains("model") ? r.at("model") : json::object());
    reg.r = get_or(r, "r", 0.0);
    reg.G = get_or(r, "G", 1.0);
    c.regimes.push_back(reg);
  }

  json chain = j.value("chain", json::object());
  c.m = get_or(chain, "m", static_cast<int>(c.regimes.size()));
  c.N = get_or(chain, "N", 0);
  if (c.m != static_cast<int>(c.regimes.size())) bad("chain.m does not match the regime count");
  if (chain.contains("lambda0")) c.lambda0 = chain.at("lambda0").get<double>();
  json rates = chain.value("rates", json::object());
  if (rates.contains("dense")) {
    c.rates.dense = rates.at("dense").get<std::vector<std::vector<double>>>();
  }
  for (const auto& rule : rates.value("rules", json::array())) {
    c.rates.rules.push_back({require<int>(rule, "s"), require<std::vector<int>>(rule, "history"),
                             require<double>(rule, "rate")});
  }
  c.rates.default_rate = get_or(rates, "default", 0.0);

  json barriers = j.value("barriers", json::object());
  c.lower = require<double>(barriers, "lower");
  c.upper = require<double>(barriers, "upper");
  c.spot = require<double>(j, "spot");
  c.maturity = require<double>(j, "maturity");
  c.initial_history = get_or(j, "initialHistory", std::vector<int>{});
  if (c.initial_history.empty()) {
    // Default: regime 1 with the alternating past 1,2,1,...
    for (int k = 0; k <= c.N; ++k) c.initial_history.push_back(c.m == 1 ? 1 : 1 + k % 2);
  }

  json inv = j.value("inversion", json::object());
  std::string backend = get_or<std::string>(inv, "backend", "gwr");
  if (backend == "gwr") {
    c.inversion.backend = InversionBackend::GWR;
  } else if (backend == "sinh") {
    c.inversion.backend = InversionBackend::SinhBromwich;
  } else {
    bad("unknown inversion backend '" + backend + "'");
  }
  c.inversion.nG = get_or(inv, "nG", c.inversion.nG);
  c.inversion.extended = get_or(inv, "extendedPrecision", c.inversion.extended);
  c.inversion.sigma0 = get_or(inv, "sigma0", c.inversion.sigma0);
  c.inversion.gamma = get_or(inv, "gamma", c.inversion.gamma);
  c.inversion.nodes = get_or(inv, "nodes", c.inversion.nodes);

  json grid = j.value("grid", json::object());
  c.grid.M = get_or(grid, "M", c.grid.M);
  c.grid.domain_factor = get_or(grid, "domainFactor", c.grid.domain_factor);
  c.epv.damping_plus = get_or(grid, "dampingPlus", c.epv.damping_plus);
  c.epv.damping_minus = get_or(grid, "dampingMinus", c.epv.damping_minus);
  c.epv.scheme = scheme_from(get_or<std::string>(grid, "scheme", "auto"));

  json tol = j.value("tolerances", json::object());
  c.tol_inner = get_or(tol, "inner", c.tol_inner);
  c.tol_outer = get_or(tol, "outer", c.tol_outer);
  c.threads = get_or(j, "threads", c.threads);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.all_histories = get_or(j, "allHistories", c.all_histories);

  json mc = j.value("mc", json::object());
  c.mc.paths = get_or<std::size_t>(mc, "paths", c.mc.paths);
  c.mc.dt = get_or(mc, "dt", c.mc.dt);
  c.mc.bridge = get_or(mc, "bridge", c.mc.bridge);
  c.mc.antithetic = get_or(mc, "antithetic", c.mc.antithetic);

  if (!(c.lower < c.upper)) bad("barriers must satisfy lower < upper");
  if (!(c.maturity > 0.0)) bad("maturity must be positive");
  if (!(c.tol_inner > 0.0 && c.tol_outer > 0.0)) bad("tolerances must be positive");
  if (c.grid.M < 64 || (c.grid.M & (c.grid.M - 1)) != 0) bad("grid.M must be a power of two >= 64");
  if (c.threads < 0) bad("threads must be non-negative");
  // Materializes the chain once so that rate and history errors surface at load time.
  build_chain(c, c.N);
  if (c.initial_history.size() != static_cast<std::size_t>(c.N + 1)) {
    bad("initialHistory must have N+1 entries");
  }
  encode(HistoryIndex{c.initial_history}, c.m);
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json to_json(const ProblemConfig& c) {
  json j;
  j["regimes"] = json::array();
  for (const auto& r : c.regimes) {
    j["regimes"].push_back({{"model", model_to_json(r.model)}, {"r", r.r}, {"G", r.G}});
  }
  json rates = json::object();
  if (c.rates.dense) rates["dense"] = *c.rates.dense;
  if (!c.rates.rules.empty()) {
    rates["rules"] = json::array();
    for (const auto& rule : c.rates.rules) {
      rates["rules"].push_back({{"s", rule.s}, {"history", rule.history}, {"rate", rule.rate}});
    }
  }
  rates["default"] = c.rates.default_rate;
  j["chain"] = {{"m", c.m}, {"N", c.N}, {"rates", rates}};
  if (c.lambda0) j["chain"]["lambda0"] = *c.lambda0;
  j["barriers"] = {{"lower", c.lower}, {"upper", c.upper}};
  j["spot"] = c.spot;
  j["maturity"] = c.maturity;
  j["initialHistory"] = c.initial_history;
  j["inversion"] = {{"backend", c.inversion.backend == InversionBackend::GWR ? "gwr" : "sinh"},
                    {"nG", c.inversion.nG},
                    {"extendedPrecision", c.inversion.extended},
                    {"sigma0", c.inversion.sigma0},
                    {"gamma", c.inversion.gamma},
                    {"nodes", c.inversion.nodes}};
  j["grid"] = {{"M", c.grid.M},
               {"domainFactor", c.grid.domain_factor},
               {"dampingPlus", c.epv.damping_plus},
               {"dampingMinus", c.epv.damping_minus},
               {"scheme", scheme_name(c.epv.scheme)}};
  j["tolerances"] = {{"inner", c.tol_inner}, {"outer", c.tol_outer}};
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["allHistories"] = c.all_histories;
  j["mc"] = {{"paths", c.mc.paths},
             {"dt", c.mc.dt},
             {"bridge", c.mc.bridge},
             {"antithetic", c.mc.antithetic}};
  return j;
}

std::vector<double> materialize_rates(const ProblemConfig& c, int N) {
  const int m = c.m;
  if (m == 1 && N > 0) {
    fail(ErrorKind::InfeasibleHistory, kModule, "a single regime admits no memory (N must be 0)");
  }
  std::size_t n = history_count(m, N);
  std::vector<double> rates(n * static_cast<std::size_t>(m), 0.0);
  if (c.rates.dense) {
    if (N != c.N) bad("a dense rate table fixes the memory depth; use rules to vary N");
    const auto& d = *c.rates.dense;
    if (d.size() != n) {
      bad("dense rate table has " + std::to_string(d.size()) + " rows, expected " +
          std::to_string(n));
    }
    for (std::size_t code = 0; code < n; ++code) {
      int h0 = decode(code, m, N).current();
      if (d[code].size() != static_cast<std::size_t>(m - 1)) {
        bad("dense rate row " + std::to_string(code) + " must have m-1 entries");
      }
      std::size_t k = 0;
      for (int s = 1; s <= m; ++s)
        if (s != h0) rates[code * m + (s - 1)] = d[code][k++];
    }
    return rates;
  }
  for (std::size_t code = 0; code < n; ++code) {
    HistoryIndex h = decode(code, m, N);
    for (int s = 1; s <= m; ++s) {
      if (s == h.current()) continue;
      double v = c.rates.default_rate;
      for (const auto& rule : c.rates.rules) {
        if (rule_matches(rule, h, s)) {
          v = rule.rate;
          break;
        }
      }
      rates[code * m + (s - 1)] = v;
    }
  }
  return rates;
}

MemoryChain build_chain(const ProblemConfig& c, int N) {
  return MemoryChain(c.m, N, materialize_rates(c, N), c.lambda0);
}

BarrierProblem build_problem(const ProblemConfig& c) {
  BarrierProblem p;
  p.regimes = c.regimes;
  p.chain = build_chain(c, c.N);
  p.lower = c.lower;
  p.upper = c.upper;
  p.spot = c.spot;
  p.maturity = c.maturity;
  p.initial = HistoryIndex{c.initial_history};
  return p;
}

int resolved_threads(const ProblemConfig& c) {
  return c.threads > 0 ? c.threads : default_thread_count();
}

PricerOptions build_pricer_options(const ProblemConfig& c) {
  PricerOptions o;
  o.grid = c.grid;
  o.epv = c.epv;
  o.tol_inner = c.tol_inner;
  o.tol_outer = c.tol_outer;
  o.threads = resolved_threads(c);
  return o;
}

McConfig build_mc_config(const ProblemConfig& c) {
  McConfig m = c.mc;
  m.seed = c.seed;
  m.threads = resolved_threads(c);
  return m;
}

}  // namespace rsb
