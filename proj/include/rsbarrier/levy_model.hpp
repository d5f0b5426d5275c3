#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>

namespace rsb {

using cplx = std::complex<double>;

// Characteristic exponent convention used by every module:
//   E[exp(i xi X_t)] = exp(-t psi(xi)).

struct BrownianDrift {
  double mu = 0.0;
  double sigma2 = 0.0;
};

struct KouJumpDiffusion {
  double mu = 0.0;
  double sigma2 = 0.0;
  double lambdaJ = 0.0;
  double p = 0.5;
  double alphaPlus = 1.0;
  double alphaMinus = 1.0;
};

struct KoBoL {
  double nu = 0.5;
  double c = 1.0;
  double lambdaPlus = 1.0;
  double lambdaMinus = -1.0;
  double mu = 0.0;
};

class LevyModel {
 public:
  using Variant = std::variant<BrownianDrift, KouJumpDiffusion, KoBoL>;

  // Constructors validate parameters and throw InvalidModel.
  static LevyModel brownian(double mu, double sigma2);
  static LevyModel kou(double mu, double sigma2, double lambdaJ, double p, double alphaPlus,
                       double alphaMinus);
  static LevyModel kobol(double nu, double c, double lambdaPlus, double lambdaMinus, double mu);
  static LevyModel from_variant(const Variant& v);

  const Variant& params() const { return v_; }
  std::string type_name() const;
  bool is_rational() const { return !std::holds_alternative<KoBoL>(v_); }

  // Second-moment rate and drift of the process; used by grid heuristics and MC.
  double drift() const;
  double diffusion_variance() const;
  // Infinite variation, or finite variation without drift.
  bool sinh_admissible() const;

 private:
  explicit LevyModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

cplx char_exponent(const LevyModel& model, cplx xi);
// d psi / d xi; used by the root polish.
cplx char_exponent_derivative(const LevyModel& model, cplx xi);

// Open strip (lo, hi) of Im xi on which psi is analytic; infinities for Brownian.
std::pair<double, double> analyticity_strip(const LevyModel& model);

// Line Im xi = omega placed strictly inside the strip on the requested side of
// the real axis: the margin is 10% of the half-width, capped at 1.
double strip_safe_line(const LevyModel& model, int side, double margin_fraction = 0.1,
                       double cap = 1.0);

}  // namespace rsb
