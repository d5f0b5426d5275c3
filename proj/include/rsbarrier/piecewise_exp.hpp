#pragma once

#include <cstddef>
#include <vector>

#include "rsbarrier/levy_model.hpp"
#include "rsbarrier/wiener_hopf.hpp"

namespace rsb {

struct ExpTerm {
  double c;
  double b;  // c * exp(b x)
};

// Real function that is a finite sum of exponentials on each of the intervals
// (-inf, x_0), [x_0, x_1), ..., [x_{K-1}, +inf).
class PiecewiseExp {
 public:
  static constexpr std::size_t kMaxPieces = 10000;

  PiecewiseExp();
  static PiecewiseExp constant(double c);
  static PiecewiseExp step(double h, double below, double above);

  double operator()(double x) const;
  std::size_t piece_count() const { return pieces_.size(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<ExpTerm>& piece(std::size_t p) const { return pieces_[p]; }
  std::vector<ExpTerm>& piece(std::size_t p) { return pieces_[p]; }
  // Index of the piece containing x.
  std::size_t locate(double x) const;
  // Left and right end of piece p (+-infinity for the outer pieces).
  double left(std::size_t p) const;
  double right(std::size_t p) const;

  // Adds a breakpoint (no-op if present); both halves keep the old terms.
  void split_at(double x);
  // x -> -x. Interval closure flips, which only matters on a null set.
  PiecewiseExp reflected() const;
  // Merges equal exponents and drops zero coefficients.
  void simplify();

  friend PiecewiseExp operator+(const PiecewiseExp& a, const PiecewiseExp& b);
  friend PiecewiseExp operator*(double s, const PiecewiseExp& a);

 private:
  std::vector<double> breaks_;
  std::vector<std::vector<ExpTerm>> pieces_;
};

// Closed-form E+/E- for Brownian and Kou regimes at a real spectral value.
// The kernels are exponential mixtures, so piecewise-exponential inputs map
// to piecewise-exponential outputs.
class ExactKouEpv {
 public:
  ExactKouEpv(const LevyModel& model, double Q);

  PiecewiseExp apply(Side side, const PiecewiseExp& u) const;
  // E+ 1_[h,inf) (E+)^-1 g (Plus) or E- 1_(-inf,h] (E-)^-1 g (Minus). The
  // point mass that (E+)^-1 creates from a jump of g at h itself is excluded.
  PiecewiseExp boundary(Side side, double h, const PiecewiseExp& g) const;

  const WHFactorization& factors() const { return f_; }

 private:
  struct Law {
    double a0 = 0.0;
    std::vector<double> a, beta;
    std::vector<double> alpha;  // rates carried by the factor's zeros
  };
  PiecewiseExp apply_plus(const Law& law, const PiecewiseExp& u) const;
  PiecewiseExp boundary_plus(const Law& law, double h, const PiecewiseExp& g) const;

  WHFactorization f_;
  Law plus_, minus_;
};

// u times the half-line indicator; region encodes the closed/open side.
enum class HalfLine { Below, AtOrAbove };
PiecewiseExp indicator_multiply(const PiecewiseExp& u, double h, HalfLine keep);

}  // namespace rsb
