#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rsbarrier/config.hpp"

namespace rsb {

struct PriceRow {
  std::size_t code = 0;
  std::string history;
  double price = 0.0;
  std::string backend;
  int terms = 0;  // n_G or N_q
  int outer_terms = 0;
  int max_sweeps = 0;
  double wall_time = 0.0;
};

struct PriceReport {
  std::vector<PriceRow> rows;
  bool outside_band = false;
  // Pricer output at every inversion node, in node order.
  std::vector<PricerResult> nodes;
};

// Factorize, price and invert at every node of the configured back end.
PriceReport run_price(const ProblemConfig& cfg);
void write_price_csv(const PriceReport& report, std::ostream& os, bool timing = true);

struct ConvergenceRow {
  double value = 0.0;
  double price = 0.0;
  double diff = 0.0;  // change from the previous rung (0 on the first)
};

// parameter in {"M", "nG", "tolOuter", "N"}
std::vector<ConvergenceRow> run_convergence(const ProblemConfig& cfg, const std::string& parameter,
                                            const std::vector<double>& ladder);
void write_convergence_csv(const std::string& parameter, const std::vector<ConvergenceRow>& rows,
                           std::ostream& os);

std::string history_label(const HistoryIndex& h);

}  // namespace rsb
