#include "rsbarrier/history_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsbarrier/errors.hpp"

namespace rsb {

namespace {
constexpr const char* kModule = "history_space";

void check_shape(int m, int N) {
  if (m < 1) fail(ErrorKind::InfeasibleHistory, kModule, "m must be >= 1");
  if (N < 0) fail(ErrorKind::InfeasibleHistory, kModule, "N must be >= 0");
  if (m == 1 && N > 0) fail(ErrorKind::InfeasibleHistory, kModule, "m = 1 requires N = 0");
}
}  // namespace

std::size_t history_count(int m, int N) {
  check_shape(m, N);
  std::size_t n = static_cast<std::size_t>(m);
  for (int j = 0; j < N; ++j) {
    n *= static_cast<std::size_t>(m - 1);
    if (n > kMaxHistories) {
      fail(ErrorKind::Resource, kModule,
           "history space larger than " + std::to_string(kMaxHistories));
    }
  }
  return n;
}

std::size_t encode(const HistoryIndex& h, int m) {
  int N = static_cast<int>(h.depth());
  check_shape(m, N);
  std::size_t code = 0;
  for (int j = 0; j <= N; ++j) {
    int lab = h.labels[j];
    if (lab < 1 || lab > m) fail(ErrorKind::InfeasibleHistory, kModule, "label out of range");
    if (j == 0) {
      code = static_cast<std::size_t>(lab - 1);
      continue;
    }
    int prev = h.labels[j - 1];
    if (lab == prev) fail(ErrorKind::InfeasibleHistory, kModule, "repeated consecutive label");
    int digit = (lab - 1) - (lab > prev ? 1 : 0);
    code = code * static_cast<std::size_t>(m - 1) + static_cast<std::size_t>(digit);
  }
  return code;
}

HistoryIndex decode(std::size_t code, int m, int N) {
  std::size_t n = history_count(m, N);
  if (code >= n) fail(ErrorKind::InfeasibleHistory, kModule, "code out of range");
  std::vector<int> digits(N + 1);
  for (int j = N; j >= 1; --j) {
    digits[j] = static_cast<int>(code % static_cast<std::size_t>(m - 1));
    code /= static_cast<std::size_t>(m - 1);
  }
  digits[0] = static_cast<int>(code);
  HistoryIndex h;
  h.labels.resize(N + 1);
  h.labels[0] = digits[0] + 1;
  for (int j = 1; j <= N; ++j) {
    int lab = digits[j] + 1;
    if (lab >= h.labels[j - 1]) ++lab;
    h.labels[j] = lab;
  }
  return h;
}

std::vector<HistoryIndex> enumerate_histories(int m, int N) {
  std::size_t n = history_count(m, N);
  std::vector<HistoryIndex> out;
  out.reserve(n);
  for (std::size_t c = 0; c < n; ++c) out.push_back(decode(c, m, N));
  return out;
}

HistoryIndex shift(const HistoryIndex& h, int s) {
  if (s == h.current()) {
    fail(ErrorKind::InvalidTransition, kModule, "target state equals current state");
  }
  HistoryIndex out;
  out.labels.reserve(h.labels.size());
  out.labels.push_back(s);
  out.labels.insert(out.labels.end(), h.labels.begin(), h.labels.end() - 1);
  return out;
}

MemoryChain::MemoryChain(int m, int N, std::vector<double> rates, std::optional<double> lambda0)
    : m_(m), N_(N), size_(history_count(m, N)), rates_(std::move(rates)) {
  if (rates_.size() != size_ * static_cast<std::size_t>(m_)) {
    fail(ErrorKind::Config, kModule, "rate table has wrong size");
  }
  lambda_h_.assign(size_, 0.0);
  current_.assign(size_, 0);
  next_.assign(size_ * m_, size_);
  double lmax = 0.0;
  for (std::size_t c = 0; c < size_; ++c) {
    HistoryIndex h = decode(c, m_, N_);
    current_[c] = h.current();
    double sum = 0.0;
    for (int s = 1; s <= m_; ++s) {
      double v = rates_[c * m_ + (s - 1)];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        fail(ErrorKind::Config, kModule, "rates must be finite and nonnegative");
      }
      if (s == h.current()) {
        if (v != 0.0) fail(ErrorKind::InvalidTransition, kModule, "nonzero rate for s = h0");
        continue;
      }
      sum += v;
      next_[c * m_ + (s - 1)] = encode(shift(h, s), m_);
    }
    lambda_h_[c] = sum;
    lmax = std::max(lmax, sum);
  }
  lambda0_ = lmax;
  if (lambda0) {
    if (*lambda0 < lmax) fail(ErrorKind::Config, kModule, "lambda0 override below max Lambda_h");
    lambda0_ = *lambda0;
    lambda0_override_ = true;
  }
}

cplx q_of_history(const MemoryChain& chain, const std::vector<double>& r, std::size_t code, cplx q) {
  return q + chain.lambda_h(code) + r[chain.current_regime(code) - 1];
}

cplx q_uniform(const MemoryChain& chain, const std::vector<double>& r, int s, cplx q) {
  return q + chain.lambda0() + r[s - 1];
}

}  // namespace rsb
