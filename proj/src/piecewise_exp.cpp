#include "rsbarrier/piecewise_exp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "rsbarrier/dual_grid.hpp"
#include "rsbarrier/errors.hpp"

namespace rsb {

namespace {

constexpr const char* kModule = "epv_operators";
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_size(std::size_t pieces) {
  if (pieces > PiecewiseExp::kMaxPieces) {
    fail(ErrorKind::Resource, kModule,
         "piecewise-exponential function exceeds " + std::to_string(PiecewiseExp::kMaxPieces) +
             " pieces");
  }
}

double real_part(cplx z, const char* what) {
  if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z))) {
    fail(ErrorKind::Domain, kModule, std::string("exact back end needs real ") + what);
  }
  return z.real();
}

}  // namespace

PiecewiseExp::PiecewiseExp() : pieces_(1) {}

PiecewiseExp PiecewiseExp::constant(double c) {
  PiecewiseExp f;
  if (c != 0.0) f.pieces_[0].push_back({c, 0.0});
  return f;
}

PiecewiseExp PiecewiseExp::step(double h, double below, double above) {
  PiecewiseExp f;
  f.breaks_ = {h};
  f.pieces_.assign(2, {});
  if (below != 0.0) f.pieces_[0].push_back({below, 0.0});
  if (above != 0.0) f.pieces_[1].push_back({above, 0.0});
  return f;
}

std::size_t PiecewiseExp::locate(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                  breaks_.begin());
}

double PiecewiseExp::left(std::size_t p) const { return p == 0 ? -kInf : breaks_[p - 1]; }

double PiecewiseExp::right(std::size_t p) const {
  return p == breaks_.size() ? kInf : breaks_[p];
}

double PiecewiseExp::operator()(double x) const {
  double s = 0.0;
  for (const auto& t : pieces_[locate(x)]) s += t.c * std::exp(t.b * x);
  return s;
}

void PiecewiseExp::split_at(double x) {
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  if (it != breaks_.end() && *it == x) return;
  std::size_t p = static_cast<std::size_t>(it - breaks_.begin());
  breaks_.insert(it, x);
  pieces_.insert(pieces_.begin() + static_cast<std::ptrdiff_t>(p), pieces_[p]);
  check_size(pieces_.size());
}

PiecewiseExp PiecewiseExp::reflected() const {
  PiecewiseExp out;
  out.breaks_.resize(breaks_.size());
  std::transform(breaks_.rbegin(), breaks_.rend(), out.breaks_.begin(),
                 [](double b) { return -b; });
  out.pieces_.assign(pieces_.rbegin(), pieces_.rend());
  for (auto& piece : out.pieces_)
    for (auto& t : piece) t.b = -t.b;
  return out;
}

void PiecewiseExp::simplify() {
  for (auto& piece : pieces_) {
    std::map<double, double> acc;
    for (const auto& t : piece) acc[t.b] += t.c;
    piece.clear();
    for (const auto& [b, c] : acc)
      if (c != 0.0) piece.push_back({c, b});
  }
}

PiecewiseExp operator+(const PiecewiseExp& a, const PiecewiseExp& b) {
  PiecewiseExp out;
  std::set_union(a.breaks_.begin(), a.breaks_.end(), b.breaks_.begin(), b.breaks_.end(),
                 std::back_inserter(out.breaks_));
  check_size(out.breaks_.size() + 1);
  out.pieces_.assign(out.breaks_.size() + 1, {});
  for (std::size_t p = 0; p < out.pieces_.size(); ++p) {
    double l = out.left(p), r = out.right(p);
    double probe = std::isinf(l) ? (std::isinf(r) ? 0.0 : r - 1.0)
                                 : (std::isinf(r) ? l + 1.0 : 0.5 * (l + r));
    const auto& pa = a.pieces_[a.locate(probe)];
    const auto& pb = b.pieces_[b.locate(probe)];
    out.pieces_[p] = pa;
    out.pieces_[p].insert(out.pieces_[p].end(), pb.begin(), pb.end());
  }
  out.simplify();
  return out;
}

PiecewiseExp operator*(double s, const PiecewiseExp& a) {
  PiecewiseExp out = a;
  for (auto& piece : out.pieces_)
    for (auto& t : piece) t.c *= s;
  out.simplify();
  return out;
}

PiecewiseExp indicator_multiply(const PiecewiseExp& u, double h, HalfLine keep) {
  PiecewiseExp out = u;
  out.split_at(h);
  std::size_t at = out.locate(h);  // first piece starting at h
  for (std::size_t p = 0; p < out.piece_count(); ++p) {
    bool below = p < at;
    if (below != (keep == HalfLine::Below)) out.piece(p).clear();
  }
  return out;
}

ExactKouEpv::ExactKouEpv(const LevyModel& model, double Q) {
  if (!model.is_rational()) {
    fail(ErrorKind::InvalidModel, kModule, "exact back end supports Brownian and Kou only");
  }
  if (!(Q > 0.0)) fail(ErrorKind::SpectralParameter, kModule, "exact back end needs real Q > 0");
  GridOptions go;
  go.M = 64;
  go.domain_factor = 1.0;
  f_ = factorize_rational(model, Q, DualGrid::for_band(-1.0, 1.0, go));
  auto build = [](const MixtureLaw& m, const std::vector<double>& zeros) {
    Law law;
    law.a0 = real_part(m.a0, "mixture weights");
    for (std::size_t j = 0; j < m.a.size(); ++j) {
      law.a.push_back(real_part(m.a[j], "mixture weights"));
      law.beta.push_back(real_part(m.beta[j], "roots"));
    }
    law.alpha = zeros;
    return law;
  };
  plus_ = build(f_.law_plus, f_.zeros_plus);
  minus_ = build(f_.law_minus, f_.zeros_minus);
}

// (E u)(x) = a0 u(x) + sum_j a_j beta_j int_0^inf exp(-beta_j y) u(x + y) dy
PiecewiseExp ExactKouEpv::apply_plus(const Law& law, const PiecewiseExp& u) const {
  PiecewiseExp out = law.a0 * u;
  const std::size_t P = u.piece_count();
  for (std::size_t p = 0; p < P; ++p) {
    double l = u.left(p), r = u.right(p);
    for (const auto& t : u.piece(p)) {
      for (std::size_t j = 0; j < law.a.size(); ++j) {
        double beta = law.beta[j];
        if (std::abs(beta - t.b) < 1e-12 * (1.0 + std::abs(beta))) {
          fail(ErrorKind::Degenerate, kModule, "input exponent coincides with a kernel rate");
        }
        if (std::isinf(r) && !(t.b < beta)) {
          fail(ErrorKind::Domain, kModule, "input grows too fast at +infinity");
        }
        double K = law.a[j] * beta * t.c / (beta - t.b);
        double at_r = std::isinf(r) ? 0.0 : std::exp((t.b - beta) * r);
        out.piece(p).push_back({K, t.b});
        if (at_r != 0.0) out.piece(p).push_back({-K * at_r, beta});
        if (p > 0) {
          double coef = K * (std::exp((t.b - beta) * l) - at_r);
          for (std::size_t q = 0; q < p; ++q) out.piece(q).push_back({coef, beta});
        }
      }
    }
  }
  out.simplify();
  return out;
}

PiecewiseExp ExactKouEpv::boundary_plus(const Law& law, double h, const PiecewiseExp& g) const {
  // 1/phi+ = c0 + c1 z + sum_k d_k / (alpha_k + z), z <-> -d/dx.
  double prod_beta = 1.0, prod_alpha = 1.0;
  for (double b : law.beta) prod_beta *= b;
  for (double a : law.alpha) prod_alpha *= a;
  double c1 = law.beta.size() == law.alpha.size() + 1 ? prod_alpha / prod_beta : 0.0;
  if (law.beta.size() != law.alpha.size() && c1 == 0.0) {
    fail(ErrorKind::Internal, kModule, "unexpected root count in exact inverse");
  }
  Law resolvent;
  double c0 = 1.0;
  for (std::size_t k = 0; k < law.alpha.size(); ++k) {
    double ak = law.alpha[k];
    double d = prod_alpha;
    for (double b : law.beta) d *= (b - ak) / b;
    for (std::size_t k2 = 0; k2 < law.alpha.size(); ++k2)
      if (k2 != k) d /= law.alpha[k2] - ak;
    c0 -= d / ak;
    resolvent.a.push_back(d / ak);
    resolvent.beta.push_back(ak);
  }

  PiecewiseExp gr = indicator_multiply(g, h, HalfLine::AtOrAbove);
  PiecewiseExp w = c0 * gr;
  if (!resolvent.a.empty()) w = w + apply_plus(resolvent, gr);
  std::vector<std::pair<double, double>> deltas;  // (position, mass) of -c1 g'
  if (c1 != 0.0) {
    PiecewiseExp dg = gr;
    for (std::size_t p = 0; p < dg.piece_count(); ++p)
      for (auto& t : dg.piece(p)) t.c *= t.b;
    w = w + (-c1) * dg;
    std::size_t first = gr.locate(h);
    for (std::size_t p = first + 1; p < gr.piece_count(); ++p) {
      double x = gr.left(p);
      double jump = gr(x);
      for (const auto& t : gr.piece(p - 1)) jump -= t.c * std::exp(t.b * x);
      if (jump != 0.0) deltas.emplace_back(x, -c1 * jump);
    }
  }
  w = indicator_multiply(w, h, HalfLine::AtOrAbove);
  PiecewiseExp out = apply_plus(law, w);
  for (const auto& [x, mass] : deltas) {
    out.split_at(x);
    std::size_t at = out.locate(x);
    for (std::size_t q = 0; q < at; ++q)
      for (std::size_t j = 0; j < law.a.size(); ++j)
        out.piece(q).push_back({mass * law.a[j] * law.beta[j] * std::exp(-law.beta[j] * x),
                                law.beta[j]});
  }
  out.simplify();
  return out;
}

PiecewiseExp ExactKouEpv::apply(Side side, const PiecewiseExp& u) const {
  if (side == Side::Plus) return apply_plus(plus_, u);
  return apply_plus(minus_, u.reflected()).reflected();
}

PiecewiseExp ExactKouEpv::boundary(Side side, double h, const PiecewiseExp& g) const {
  if (side == Side::Plus) return boundary_plus(plus_, h, g);
  return boundary_plus(minus_, -h, g.reflected()).reflected();
}

}  // namespace rsb
