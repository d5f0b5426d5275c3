#include "rsbarrier/levy_model.hpp"

#include <cmath>
#include <limits>

#include "rsbarrier/errors.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "levy_models";

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidModel, kModule, what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

LevyModel LevyModel::brownian(double mu, double sigma2) {
  require(finite(mu) && finite(sigma2), "non-finite parameter");
  require(sigma2 >= 0.0, "sigma2 must be >= 0");
  return LevyModel(BrownianDrift{mu, sigma2});
}

LevyModel LevyModel::kou(double mu, double sigma2, double lambdaJ, double p, double alphaPlus,
                         double alphaMinus) {
  require(finite(mu) && finite(sigma2) && finite(lambdaJ) && finite(p) && finite(alphaPlus) &&
              finite(alphaMinus),
          "non-finite parameter");
  require(sigma2 >= 0.0, "sigma2 must be >= 0");
  require(lambdaJ >= 0.0, "lambdaJ must be >= 0");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0,1]");
  require(alphaPlus > 0.0 && alphaMinus > 0.0, "alphaPlus and alphaMinus must be > 0");
  return LevyModel(KouJumpDiffusion{mu, sigma2, lambdaJ, p, alphaPlus, alphaMinus});
}

LevyModel LevyModel::kobol(double nu, double c, double lambdaPlus, double lambdaMinus, double mu) {
  require(finite(nu) && finite(c) && finite(lambdaPlus) && finite(lambdaMinus) && finite(mu),
          "non-finite parameter");
  require(nu > 0.0 && nu < 2.0, "nu must lie in (0,2)");
  require(nu != 1.0, "nu = 1 is not supported");
  require(c > 0.0, "c must be > 0");
  require(lambdaMinus < 0.0 && lambdaPlus > 0.0, "need lambdaMinus < 0 < lambdaPlus");
  return LevyModel(KoBoL{nu, c, lambdaPlus, lambdaMinus, mu});
}

LevyModel LevyModel::from_variant(const Variant& v) {
  return std::visit(
      [](const auto& m) -> LevyModel {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BrownianDrift>) {
          return brownian(m.mu, m.sigma2);
        } else if constexpr (std::is_same_v<T, KouJumpDiffusion>) {
          return kou(m.mu, m.sigma2, m.lambdaJ, m.p, m.alphaPlus, m.alphaMinus);
        } else {
          return kobol(m.nu, m.c, m.lambdaPlus, m.lambdaMinus, m.mu);
        }
      },
      v);
}

std::string LevyModel::type_name() const {
  switch (v_.index()) {
    case 0: return "BrownianDrift";
    case 1: return "KouJumpDiffusion";
    default: return "KoBoL";
  }
}

double LevyModel::drift() const {
  return std::visit([](const auto& m) { return m.mu; }, v_);
}

double LevyModel::diffusion_variance() const {
  if (auto* b = std::get_if<BrownianDrift>(&v_)) return b->sigma2;
  if (auto* k = std::get_if<KouJumpDiffusion>(&v_)) return k->sigma2;
  return 0.0;
}

bool LevyModel::sinh_admissible() const {
  if (auto* b = std::get_if<BrownianDrift>(&v_)) return b->sigma2 > 0.0 || b->mu == 0.0;
  if (auto* k = std::get_if<KouJumpDiffusion>(&v_)) return k->sigma2 > 0.0 || k->mu == 0.0;
  const auto& kb = std::get<KoBoL>(v_);
  return kb.nu > 1.0 || kb.mu == 0.0;
}

std::pair<double, double> analyticity_strip(const LevyModel& model) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto& v = model.params();
  if (std::holds_alternative<BrownianDrift>(v)) return {-inf, inf};
  if (auto* k = std::get_if<KouJumpDiffusion>(&v)) {
    if (k->lambdaJ == 0.0) return {-inf, inf};
    double lo = k->p > 0.0 ? -k->alphaPlus : -inf;
    double hi = k->p < 1.0 ? k->alphaMinus : inf;
    return {lo, hi};
  }
  const auto& kb = std::get<KoBoL>(v);
  return {kb.lambdaMinus, kb.lambdaPlus};
}

double strip_safe_line(const LevyModel& model, int side, double margin_fraction, double cap) {
  auto [lo, hi] = analyticity_strip(model);
  double edge = side < 0 ? -lo : hi;
  if (!std::isfinite(edge)) return side < 0 ? -cap : cap;
  // Stay inside by the margin, and never further out than `cap`.
  double w = std::min(edge * (1.0 - margin_fraction), cap);
  return side < 0 ? -w : w;
}

namespace {

void check_strip(const LevyModel& model, cplx xi, bool strict) {
  auto [lo, hi] = analyticity_strip(model);
  double y = xi.imag();
  bool inside = strict ? (y > lo && y < hi) : (y >= lo && y <= hi);
  if (!inside) {
    fail(ErrorKind::Domain, kModule,
         "Im xi = " + std::to_string(y) + " outside analyticity strip of " + model.type_name());
  }
}

}  // namespace

cplx char_exponent(const LevyModel& model, cplx xi) {
  const cplx I(0.0, 1.0);
  const auto& v = model.params();
  if (auto* b = std::get_if<BrownianDrift>(&v)) {
    return 0.5 * b->sigma2 * xi * xi - I * b->mu * xi;
  }
  if (auto* k = std::get_if<KouJumpDiffusion>(&v)) {
    check_strip(model, xi, false);
    cplx base = 0.5 * k->sigma2 * xi * xi - I * k->mu * xi;
    if (k->lambdaJ == 0.0) return base;
    cplx dp = k->alphaPlus - I * xi;
    cplx dm = k->alphaMinus + I * xi;
    if ((k->p > 0.0 && dp == 0.0) || (k->p < 1.0 && dm == 0.0)) {
      fail(ErrorKind::Pole, kModule, "xi is a pole of the Kou jump transform");
    }
    cplx jump = 1.0;
    if (k->p > 0.0) jump -= k->p * k->alphaPlus / dp;
    if (k->p < 1.0) jump -= (1.0 - k->p) * k->alphaMinus / dm;
    return base + k->lambdaJ * jump;
  }
  const auto& kb = std::get<KoBoL>(v);
  check_strip(model, xi, true);
  double g = std::tgamma(-kb.nu);
  cplx a = std::pow(cplx(kb.lambdaPlus), kb.nu) - std::pow(kb.lambdaPlus + I * xi, kb.nu);
  cplx b = std::pow(cplx(-kb.lambdaMinus), kb.nu) - std::pow(-kb.lambdaMinus - I * xi, kb.nu);
  return -I * kb.mu * xi + kb.c * g * (a + b);
}

cplx char_exponent_derivative(const LevyModel& model, cplx xi) {
  const cplx I(0.0, 1.0);
  const auto& v = model.params();
  if (auto* b = std::get_if<BrownianDrift>(&v)) return b->sigma2 * xi - I * b->mu;
  if (auto* k = std::get_if<KouJumpDiffusion>(&v)) {
    cplx d = k->sigma2 * xi - I * k->mu;
    if (k->lambdaJ == 0.0) return d;
    cplx dp = k->alphaPlus - I * xi;
    cplx dm = k->alphaMinus + I * xi;
    if (k->p > 0.0) d -= k->lambdaJ * k->p * k->alphaPlus * I / (dp * dp);
    if (k->p < 1.0) d += k->lambdaJ * (1.0 - k->p) * k->alphaMinus * I / (dm * dm);
    return d;
  }
  const auto& kb = std::get<KoBoL>(v);
  double g = std::tgamma(-kb.nu);
  cplx a = -I * kb.nu * std::pow(kb.lambdaPlus + I * xi, kb.nu - 1.0);
  cplx b = I * kb.nu * std::pow(-kb.lambdaMinus - I * xi, kb.nu - 1.0);
  return -I * kb.mu + kb.c * g * (a + b);
}

}  // namespace rsb
