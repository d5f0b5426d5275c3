#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace rsb {

using cplx = std::complex<double>;

// Regime labels are 1-based (1..m) as in the config format.
struct HistoryIndex {
  std::vector<int> labels;  // (h0, h_-1, ..., h_-N)

  int current() const { return labels.front(); }
  std::size_t depth() const { return labels.size() - 1; }
  bool operator==(const HistoryIndex&) const = default;
};

std::size_t history_count(int m, int N);
std::size_t encode(const HistoryIndex& h, int m);
HistoryIndex decode(std::size_t code, int m, int N);
std::vector<HistoryIndex> enumerate_histories(int m, int N);
HistoryIndex shift(const HistoryIndex& h, int s);

constexpr std::size_t kMaxHistories = 100000;

class MemoryChain {
 public:
  // rates[code * m + (s-1)] = lambda_{s,h}; entries with s = h0 must be zero.
  MemoryChain(int m, int N, std::vector<double> rates, std::optional<double> lambda0 = {});
  static MemoryChain trivial() { return MemoryChain(1, 0, {0.0}); }

  int m() const { return m_; }
  int N() const { return N_; }
  std::size_t size() const { return size_; }

  double rate(std::size_t code, int s) const { return rates_[code * m_ + (s - 1)]; }
  const std::vector<double>& rates() const { return rates_; }
  double lambda_h(std::size_t code) const { return lambda_h_[code]; }
  double lambda0() const { return lambda0_; }
  bool lambda0_overridden() const { return lambda0_override_; }
  int current_regime(std::size_t code) const { return current_[code]; }
  // Code of shift(h, s); undefined (returns size()) for s = h0.
  std::size_t next(std::size_t code, int s) const { return next_[code * m_ + (s - 1)]; }
  HistoryIndex history(std::size_t code) const { return decode(code, m_, N_); }

 private:
  int m_;
  int N_;
  std::size_t size_;
  std::vector<double> rates_;
  std::vector<double> lambda_h_;
  std::vector<int> current_;
  std::vector<std::size_t> next_;
  double lambda0_ = 0.0;
  bool lambda0_override_ = false;
};

// Q_h(q) = q + Lambda_h + r_{h0}
cplx q_of_history(const MemoryChain& chain, const std::vector<double>& r, std::size_t code, cplx q);
// Q(s; q) = q + Lambda0 + r_s
cplx q_uniform(const MemoryChain& chain, const std::vector<double>& r, int s, cplx q);

}  // namespace rsb
