#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsbarrier/laplace_inversion.hpp"
#include "rsbarrier/mc_oracle.hpp"
#include "rsbarrier/pricer.hpp"

namespace rsb {

// A rule sets lambda_{s,h} for every history whose leading labels match
// `history` (a prefix of (h0, h-1, ..., h-N)). The first matching rule wins.
struct RateRule {
  int s = 1;
  std::vector<int> history;
  double rate = 0.0;
};

struct RateSpec {
  // dense[code] lists lambda_{s,h} for s != h0 in ascending s.
  std::optional<std::vector<std::vector<double>>> dense;
  std::vector<RateRule> rules;
  double default_rate = 0.0;
};

struct InversionConfig {
  InversionBackend backend = InversionBackend::GWR;
  int nG = 8;
  bool extended = false;
  double sigma0 = 0.0;  // 0: max(0.5, 2/T)
  double gamma = 0.9 * 3.14159265358979323846;
  int nodes = 40;
};

struct ProblemConfig {
  std::vector<Regime> regimes;
  int m = 1;
  int N = 0;
  RateSpec rates;
  std::optional<double> lambda0;
  double lower = -1.0;
  double upper = 1.0;
  double spot = 0.0;
  double maturity = 1.0;
  std::vector<int> initial_history{1};
  InversionConfig inversion;
  GridOptions grid;
  EpvOptions epv;
  double tol_inner = 1e-10;
  double tol_outer = 1e-8;
  int threads = 0;  // 0: RSB_THREADS or hardware concurrency
  std::uint64_t seed = 1;
  McConfig mc;
  bool all_histories = false;
};

ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::string& path);
nlohmann::json to_json(const ProblemConfig& cfg);

// Dense rate table for depth N, from the dense spec (N must match) or the rules.
std::vector<double> materialize_rates(const ProblemConfig& cfg, int N);
MemoryChain build_chain(const ProblemConfig& cfg, int N);
BarrierProblem build_problem(const ProblemConfig& cfg);
PricerOptions build_pricer_options(const ProblemConfig& cfg);
McConfig build_mc_config(const ProblemConfig& cfg);
int resolved_threads(const ProblemConfig& cfg);

nlohmann::json model_to_json(const LevyModel& m);
LevyModel model_from_json(const nlohmann::json& j);

}  // namespace rsb
