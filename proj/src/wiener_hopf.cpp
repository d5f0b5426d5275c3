#include "rsbarrier/wiener_hopf.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rsbarrier/errors.hpp"
#include "rsbarrier/fft.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "wiener_hopf";
const cplx I(0.0, 1.0);

using Poly = std::vector<cplx>;  // ascending powers of xi

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

Poly scale(Poly a, cplx s) {
  for (auto& c : a) c *= s;
  return a;
}

std::vector<cplx> poly_roots(Poly p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  int n = static_cast<int>(p.size()) - 1;
  if (n <= 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Internal, kModule, "eigen solver failed");
  std::vector<cplx> r(n);
  for (int i = 0; i < n; ++i) r[i] = es.eigenvalues()[i];
  return r;
}

// Newton polish on Q + psi; keeps the companion root if an update would not
// reduce the residual.
cplx polish(const LevyModel& model, cplx Q, cplx xi) {
  auto f = [&](cplx z) { return Q + char_exponent(model, z); };
  cplx fx;
  try {
    fx = f(xi);
  } catch (const Error&) {
    return xi;
  }
  for (int it = 0; it < 3; ++it) {
    cplx d = char_exponent_derivative(model, xi);
    if (d == 0.0) break;
    cplx cand = xi - fx / d;
    cplx fc;
    try {
      fc = f(cand);
    } catch (const Error&) {
      break;
    }
    if (!(std::abs(fc) < std::abs(fx))) break;
    xi = cand;
    fx = fc;
  }
  return xi;
}

MixtureLaw build_law(const std::vector<cplx>& beta, const std::vector<double>& zeros) {
  MixtureLaw law;
  law.beta = beta;
  std::size_t np = beta.size();
  std::size_t nz = zeros.size();
  if (nz > np) fail(ErrorKind::Internal, kModule, "more zeros than poles in a WH factor");
  law.a.resize(np);
  for (std::size_t j = 0; j < np; ++j) {
    cplx v = 1.0;
    for (std::size_t i = 0; i < np; ++i) {
      if (i == j) continue;
      cplx gap = beta[i] - beta[j];
      if (std::abs(gap) < 1e-10 * (1.0 + std::abs(beta[j]))) {
        fail(ErrorKind::Degenerate, kModule, "repeated root of Q + psi");
      }
      v *= beta[i] / gap;
    }
    for (double a : zeros) v *= (a - beta[j]) / a;
    law.a[j] = v;
  }
  if (nz == np) {
    cplx v = 1.0;
    for (std::size_t j = 0; j < np; ++j) v *= beta[j] / zeros[j];
    law.a0 = v;
  }
  return law;
}

}  // namespace

cplx MixtureLaw::tail(double y) const {
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::exp(-beta[j] * y);
  return s;
}

cplx WHFactorization::phi(Side side, cplx xi) const {
  if (!rational) fail(ErrorKind::Internal, kModule, "closed-form phi requested for integral factors");
  cplx z = side == Side::Plus ? -I * xi : I * xi;
  const auto& beta = side == Side::Plus ? beta_plus : beta_minus;
  const auto& zeros = side == Side::Plus ? zeros_plus : zeros_minus;
  cplx v = 1.0;
  for (cplx b : beta) v *= b / (b + z);
  for (double a : zeros) v *= (a + z) / a;
  return v;
}

double WHFactorization::product_residual() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < symbol.size(); ++k) {
    double r = std::abs(phi_plus[k] * phi_minus[k] / symbol[k] - 1.0);
    worst = std::max(worst, r);
  }
  return worst;
}

WHFactorization factorize_rational(const LevyModel& model, cplx Q, const DualGrid& grid) {
  if (!model.is_rational()) fail(ErrorKind::Internal, kModule, "rational route needs Brownian/Kou");
  double mu = model.drift();
  double s2 = model.diffusion_variance();
  double lam = 0.0, p = 0.5, ap = 1.0, am = 1.0;
  if (auto* k = std::get_if<KouJumpDiffusion>(&model.params())) {
    lam = k->lambdaJ;
    p = k->p;
    ap = k->alphaPlus;
    am = k->alphaMinus;
  }
  if (!(s2 > 0.0) && mu == 0.0) {
    fail(ErrorKind::Degenerate, kModule, "need sigma2 > 0 or nonzero drift");
  }
  if (Q == 0.0) fail(ErrorKind::SpectralParameter, kModule, "Q = 0");
  bool up = lam > 0.0 && p > 0.0;
  bool down = lam > 0.0 && p < 1.0;

  Poly base{Q + lam, -I * mu, 0.5 * s2};
  Poly D{1.0};
  Poly up_factor{ap, -I};    // alpha+ - i xi
  Poly down_factor{am, I};   // alpha- + i xi
  if (up) D = mul(D, up_factor);
  if (down) D = mul(D, down_factor);
  Poly P = mul(base, D);
  if (up) P = add(P, scale(down ? down_factor : Poly{1.0}, -lam * p * ap));
  if (down) P = add(P, scale(up ? up_factor : Poly{1.0}, -lam * (1.0 - p) * am));

  WHFactorization f;
  f.model = model;
  f.Q = Q;
  f.rational = true;
  for (cplx root : poly_roots(P)) {
    root = polish(model, Q, root);
    double tol = 1e-8 * (1.0 + std::abs(root));
    if (root.imag() < -tol) {
      f.beta_plus.push_back(I * root);
    } else if (root.imag() > tol) {
      f.beta_minus.push_back(-I * root);
    } else {
      fail(ErrorKind::Degenerate, kModule,
           "root of Q + psi on the real axis (Q too small or on the spectrum of -psi)");
    }
  }
  std::size_t want_plus = (s2 > 0.0 ? 1 : 0) + (up ? 1 : 0) + (!(s2 > 0.0) && mu > 0.0 ? 1 : 0);
  std::size_t want_minus = (s2 > 0.0 ? 1 : 0) + (down ? 1 : 0) + (!(s2 > 0.0) && mu < 0.0 ? 1 : 0);
  if (f.beta_plus.size() != want_plus || f.beta_minus.size() != want_minus) {
    fail(ErrorKind::Internal, kModule,
         "root count mismatch: " + std::to_string(f.beta_plus.size()) + "/" +
             std::to_string(f.beta_minus.size()) + " vs expected " + std::to_string(want_plus) +
             "/" + std::to_string(want_minus));
  }
  auto by_modulus = [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a.imag() < b.imag();
  };
  std::sort(f.beta_plus.begin(), f.beta_plus.end(), by_modulus);
  std::sort(f.beta_minus.begin(), f.beta_minus.end(), by_modulus);
  if (up) f.zeros_plus.push_back(ap);
  if (down) f.zeros_minus.push_back(am);
  f.law_plus = build_law(f.beta_plus, f.zeros_plus);
  f.law_minus = build_law(f.beta_minus, f.zeros_minus);

  std::size_t M = grid.size();
  f.phi_plus.resize(M);
  f.phi_minus.resize(M);
  f.symbol.resize(M);
  for (std::size_t k = 0; k < M; ++k) {
    double xi = grid.xi(k);
    f.phi_plus[k] = f.phi(Side::Plus, xi);
    f.phi_minus[k] = f.phi(Side::Minus, xi);
    f.symbol[k] = Q / (Q + char_exponent(model, xi));
  }
  return f;
}

namespace {

struct LaguerreRule {
  std::vector<double> x, w;
};

LaguerreRule laguerre(int n) {
  // Golub-Welsch on the Jacobi matrix of the Laguerre weight exp(-u).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = 2.0 * k + 1.0;
    if (k + 1 < n) J(k, k + 1) = J(k + 1, k) = k + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  LaguerreRule r;
  for (int k = 0; k < n; ++k) {
    r.x.push_back(es.eigenvalues()[k]);
    double v = es.eigenvectors()(0, k);
    r.w.push_back(v * v);
  }
  return r;
}

// log(Q / (Q + psi)) on the principal branch, with jump detection along a
// sequence of points.
struct LogTracker {
  double last_arg = 0.0;
  double unwrapped = 0.0;
  bool first = true;
  bool crossed = false;
  void push(cplx g) {
    double a = std::arg(g);
    if (!first) {
      double d = a - last_arg;
      if (std::abs(d) > std::numbers::pi) crossed = true;
      while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
      while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
      unwrapped += d;
    }
    first = false;
    last_arg = a;
  }
};

struct LineResult {
  bool ok = false;
  CVector log_phi;  // on grid, FFT order
  double line = 0.0;
};

// One side of the Cauchy decomposition. sign = +1 for phi+ (line below the
// evaluation line), -1 for phi- (line above).
LineResult project(const LevyModel& model, cplx Q, const DualGrid& grid, int sign, double d,
                   const IntegralOptions& opt, const LaguerreRule& lag) {
  LineResult res;
  const std::size_t M = grid.size();
  const double dxi = grid.dxi();
  const double s = opt.shift;
  const double w = sign > 0 ? std::min(s, 0.0) - d : std::max(s, 0.0) + d;
  res.line = w;
  const double delta = w - s;

  double h = d * 2.0 * std::numbers::pi / opt.steps_per_distance;
  auto R = static_cast<long long>(std::ceil(dxi / h));
  if (R < 1) R = 1;
  h = dxi / static_cast<double>(R);
  const long long half = static_cast<long long>(M / 2);
  const long long J = 4 * half * R;  // uniform part covers |t| <= 4 max|xi|
  const double T = static_cast<double>(J) * h;

  // Integrand samples and winding check along the quadrature line and the
  // evaluation line.
  const long long nodes = 2 * J + 1;
  std::vector<cplx> a(static_cast<std::size_t>(nodes));
  LogTracker on_line, on_eval;
  try {
    for (long long j = -J; j <= J; ++j) {
      double t = static_cast<double>(j) * h;
      cplx eta(t, w);
      cplx g = 1.0 + char_exponent(model, eta) / Q;
      on_line.push(g);
      on_eval.push(1.0 + char_exponent(model, cplx(t, s)) / Q);
      double wt = (j == -J || j == J) ? 0.5 * h : h;
      a[static_cast<std::size_t>(j + J)] = -std::log(g) * wt;
    }
  } catch (const Error&) {
    return res;
  }
  if (on_line.crossed) return res;
  if (std::abs(on_line.unwrapped - on_eval.unwrapped) > std::numbers::pi) return res;

  // Convolution S(n) = sum_j a_j / ((j - n) h + i delta) for n = k R.
  std::size_t need = static_cast<std::size_t>(2 * J + 2 * half * R + 2);
  std::size_t Nf = 1;
  while (Nf < need) Nf <<= 1;
  CVector A(Nf, 0.0), B(Nf, 0.0);
  auto idx = [Nf](long long i) {
    long long m = i % static_cast<long long>(Nf);
    if (m < 0) m += static_cast<long long>(Nf);
    return static_cast<std::size_t>(m);
  };
  for (long long j = -J; j <= J; ++j) A[idx(j)] = a[static_cast<std::size_t>(j + J)];
  const long long span = J + half * R;
  for (long long m = -span; m <= span; ++m) {
    // b(m) = kappa(-m)
    B[idx(m)] = 1.0 / cplx(-static_cast<double>(m) * h, delta);
  }
  Fft fft(Nf);
  fft.forward(A);
  fft.forward(B);
  for (std::size_t i = 0; i < Nf; ++i) A[i] *= B[i];
  fft.inverse(A);

  cplx sum0 = 0.0;
  for (long long j = -J; j <= J; ++j) {
    sum0 += a[static_cast<std::size_t>(j + J)] / cplx(static_cast<double>(j) * h, w);
  }

  // Laguerre tails beyond |t| = T, t = +-T exp(u).
  std::vector<cplx> tail_eta, tail_f;
  for (int sgn : {1, -1}) {
    for (std::size_t l = 0; l < lag.x.size(); ++l) {
      double eu = std::exp(lag.x[l]);
      cplx eta(sgn * T * eu, w);
      cplx F;
      try {
        F = -std::log(1.0 + char_exponent(model, eta) / Q);
      } catch (const Error&) {
        return res;
      }
      tail_eta.push_back(eta);
      // Both half-lines carry weight T e^u du; e^u undoes the Laguerre weight.
      tail_f.push_back(F * (lag.w[l] * eu * T * eu));
    }
  }

  res.log_phi.resize(M);
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < M; ++k) {
    long long kk = static_cast<long long>(k);
    if (kk >= half) kk -= 2 * half;
    cplx xi(static_cast<double>(kk) * dxi, s);
    cplx total = A[idx(kk * R)] - sum0;
    for (std::size_t i = 0; i < tail_eta.size(); ++i) {
      const cplx& eta = tail_eta[i];
      total += tail_f[i] * xi / (eta * (eta - xi));
    }
    res.log_phi[k] = static_cast<double>(sign) * total / two_pi_i;
  }
  res.ok = true;
  return res;
}

}  // namespace

WHFactorization factorize_integral(const LevyModel& model, cplx Q, const DualGrid& grid,
                                   const IntegralOptions& opt) {
  if (Q == 0.0) fail(ErrorKind::SpectralParameter, kModule, "Q = 0");
  WHFactorization f;
  f.model = model;
  f.Q = Q;
  f.rational = false;
  auto [lo, hi] = analyticity_strip(model);
  LaguerreRule lag = laguerre(opt.laguerre_nodes);

  f.symbol.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    f.symbol[k] = Q / (Q + char_exponent(model, cplx(grid.xi(k), opt.shift)));
  }

  double d0[2];
  for (int i = 0; i < 2; ++i) {
    double room;
    if (i == 0) {
      room = std::isfinite(lo) ? 0.9 * (std::min(opt.shift, 0.0) - lo) : 1.0;
    } else {
      room = std::isfinite(hi) ? 0.9 * (hi - std::max(opt.shift, 0.0)) : 1.0;
    }
    if (!(room > 0.0)) fail(ErrorKind::Contour, kModule, "evaluation line outside the strip");
    d0[i] = opt.distance > 0.0 ? std::min(opt.distance, room) : std::min(1.0, room);
  }
  // A zero of Q + psi close to a quadrature line passes the winding check but
  // spoils the trapezoid rule, so lines move closer until the factors
  // reproduce the symbol.
  constexpr double kAccept = 1e-10;
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int k = 0; k <= opt.max_halvings; ++k) {
    double scale = std::ldexp(1.0, -k);
    LineResult rp = project(model, Q, grid, 1, d0[0] * scale, opt, lag);
    if (!rp.ok) continue;
    LineResult rm = project(model, Q, grid, -1, d0[1] * scale, opt, lag);
    if (!rm.ok) continue;
    WHFactorization g = f;
    g.phi_plus.resize(grid.size());
    g.phi_minus.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      g.phi_plus[j] = std::exp(rp.log_phi[j]);
      g.phi_minus[j] = std::exp(rm.log_phi[j]);
    }
    g.line_plus = rp.line;
    g.line_minus = rm.line;
    double res = g.product_residual();
    if (res < best) {
      best = res;
      f = std::move(g);
      any = true;
    }
    if (res < kAccept) break;
  }
  if (!any) {
    fail(ErrorKind::Contour, kModule,
         "log of Q + psi winds along every tried line; raise Re Q or shift omega");
  }
  return f;
}

WHFactorization factorize(const LevyModel& model, cplx Q, const DualGrid& grid) {
  if (model.is_rational()) return factorize_rational(model, Q, grid);
  return factorize_integral(model, Q, grid);
}

CVector factor_on_line(const WHFactorization& f, const DualGrid& grid, Side side, double shift) {
  if (shift == 0.0) return side == Side::Plus ? f.phi_plus : f.phi_minus;
  if (f.rational) {
    CVector out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = f.phi(side, cplx(grid.xi(k), shift));
    return out;
  }
  IntegralOptions opt;
  opt.shift = shift;
  WHFactorization g = factorize_integral(f.model, f.Q, grid, opt);
  return side == Side::Plus ? g.phi_plus : g.phi_minus;
}

}  // namespace rsb
