#pragma once

// Oscillatory quadrature of ∫ K(zx) rho(x) dx over singular piecewise
// densities, for the three kernels that appear in the Lévy–Khintchine
// exponent:
//
//   one_minus_cos   1 - cos(zx)
//   sin             sin(zx)
//   x_minus_sin     zx - sin(zx)       (compensated small jumps)
//
// Each piece is split into three regions relative to s = |z|:
//
//   core    x < thr/s      Taylor series of K against analytic or numeric
//                          moments ∫ (sx)^p rho dx
//   smooth  thr/s..1/s     Gauss–Kronrod on geometric panels
//   osc     x > 1/s        Gauss–Kronrod on half-period panels; beyond
//                          s*x = 40 power-law pieces switch to the
//                          integration-by-parts series, monotone pieces
//                          truncate with the second-mean-value bound.
//
// Sign symmetry in z is applied exactly: 1-cos is even, the others odd.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>

#include "huntkit/detail/gauss_kronrod.hpp"
#include "huntkit/errors.hpp"
#include "huntkit/model.hpp"

namespace huntkit {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  std::size_t panels = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    abs_err += o.abs_err;
    panels += o.panels;
    return *this;
  }
};

enum class Kernel { one_minus_cos, sin, x_minus_sin };

namespace quad_detail {

using detail::PanelResult;

inline constexpr double kTaylorCos = 1e-4;
inline constexpr double kTaylorSin = 1e-4;
inline constexpr double kTaylorComp = 1e-3;
inline constexpr double kSeriesStart = 40.0;   // s*x where the IBP series takes over
inline constexpr std::size_t kMaxOscPanels = 4'000'000;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double x_minus_sin(double u) {
  const double a = std::abs(u);
  if (a < 0.5) {
    // u^3/6 - u^5/120 + ... ; 9 terms reach double precision for |u| < 0.5
    const double u2 = u * u;
    double term = u * u2 / 6.0;
    double sum = term;
    for (int k = 2; k < 10; ++k) {
      term *= -u2 / ((2.0 * k) * (2.0 * k + 1.0));
      sum += term;
    }
    return sum;
  }
  return u - std::sin(u);
}

inline double kernel_value(Kernel k, double u) {
  switch (k) {
    case Kernel::one_minus_cos: {
      const double h = std::sin(0.5 * u);
      return 2.0 * h * h;
    }
    case Kernel::sin:
      return std::sin(u);
    case Kernel::x_minus_sin:
      return x_minus_sin(u);
  }
  return 0.0;
}

inline double taylor_threshold(Kernel k) {
  switch (k) {
    case Kernel::one_minus_cos: return kTaylorCos;
    case Kernel::sin: return kTaylorSin;
    case Kernel::x_minus_sin: return kTaylorComp;
  }
  return kTaylorCos;
}

// ∫_a^b (s x)^p kappa x^{-1-alpha} dx, closed form.
inline double power_moment(const PowerLaw& t, double p, double a, double b, double s) {
  if (t.kappa == 0.0) return 0.0;
  const double e = p - t.alpha;
  if (a == 0.0) {
    if (!(e > 0.0)) throw DivergenceError("moment diverges at 0 (p - alpha <= 0)");
    return t.kappa * std::pow(s * b, p) * std::pow(b, -t.alpha) / e;
  }
  if (!std::isfinite(b)) {
    if (!(e < 0.0)) throw DivergenceError("moment diverges at infinity (p - alpha >= 0)");
    return -t.kappa * std::pow(s * a, p) * std::pow(a, -t.alpha) / e;
  }
  const double lr = std::log(b / a);
  const double base = t.kappa * std::pow(s * a, p) * std::pow(a, -t.alpha);
  if (e == 0.0) return base * lr;
  if (std::abs(e * lr) < 1.0) return base * std::expm1(e * lr) / e;
  return (t.kappa * std::pow(s * b, p) * std::pow(b, -t.alpha) - base) / e;
}

// ∫_a^b (s x)^p rho dx, numerically in u = s x.
inline PanelResult numeric_moment(const Formula& f, double p, double a, double b, double s,
                                  double rel) {
  auto g = [&](double u) { return std::pow(u, p) * formula_at(f, u / s) / s; };
  PanelResult out;
  if (a > 0.0) {
    double lo = a;
    while (lo < b) {
      const double hi = std::min(b, 2.0 * lo);
      out += detail::adaptive_gk(g, s * lo, s * hi, 0.0, rel);
      lo = hi;
    }
    return out;
  }
  // Toward zero: halving panels with a geometric-ratio tail estimate.
  double hi = b;
  double prev = 0.0;
  for (int k = 0; k < 4000; ++k) {
    const double lo = 0.5 * hi;
    if (lo < 1e-300) break;
    const PanelResult pr = detail::adaptive_gk(g, s * lo, s * hi, 0.0, rel);
    out += pr;
    if (k >= 4 && prev != 0.0) {
      const double r = std::abs(pr.value / prev);
      if (r < 0.95) {
        const double tail = std::abs(pr.value) * r / (1.0 - r);
        if (tail <= 1e-17 * std::abs(out.value) || tail == 0.0) {
          out.abs_err += 2.0 * tail;
          return out;
        }
      }
    }
    if (pr.value == 0.0 && prev == 0.0 && k > 8) return out;
    prev = pr.value;
    hi = lo;
  }
  // Ran out of range: accept only if the ratio shows geometric decay.
  throw DivergenceError("moment near 0 does not converge numerically");
}

inline PanelResult moment(const Piece& piece, double p, double a, double b, double s,
                          double rel = 1e-13) {
  if (!(b > a)) return {};
  if (auto terms = power_terms(piece.formula)) {
    double v = 0.0, mag = 0.0;
    for (const auto& t : *terms) {
      const double m = power_moment(t, p, a, b, s);
      v += m;
      mag += std::abs(m);
    }
    return {v, 4.0 * kEps * mag, 0};
  }
  return numeric_moment(piece.formula, p, a, b, s, rel);
}

// ∫_x^∞ e^{isx} x^{-sigma} dx by repeated integration by parts. Valid as an
// asymptotic series for s*x large; used only for s*x >= kSeriesStart.
inline std::complex<double> ibp_tail(double sigma, double s, double x, double& err) {
  if (!std::isfinite(x)) {
    if (!(sigma > 0.0)) throw DivergenceError("oscillatory tail diverges (alpha <= -1)");
    return {0.0, 0.0};
  }
  const std::complex<double> w(0.0, -1.0 / (s * x));
  std::complex<double> term(std::pow(x, -sigma), 0.0);
  std::complex<double> sum = term;
  double last = std::abs(term);
  for (int k = 0; k < 80; ++k) {
    const std::complex<double> next = term * ((sigma + k) * w);
    const double an = std::abs(next);
    if (an >= last) break;  // asymptotic series turning
    sum += next;
    term = next;
    last = an;
    if (an <= 1e-17 * std::abs(sum)) break;
  }
  const double phase = s * x;
  const std::complex<double> rot = std::polar(1.0 / s, phase) * std::complex<double>(0.0, 1.0);
  const double lead = std::abs(sum) / s;
  // truncation + the phase uncertainty of s*x in double precision
  err += 2.0 * last / s + lead * std::min(2.0, 4.0 * kEps * std::abs(phase));
  return rot * sum;
}

// ∫_a^b e^{isx} rho dx for a power-like piece with s*a >= kSeriesStart.
inline std::complex<double> power_oscillatory(const std::vector<PowerLaw>& terms, double a,
                                              double b, double s, double& err) {
  std::complex<double> v{0.0, 0.0};
  for (const auto& t : terms) {
    if (t.kappa == 0.0) continue;
    double e = 0.0;
    const double sigma = 1.0 + t.alpha;
    const std::complex<double> d = ibp_tail(sigma, s, a, e) - ibp_tail(sigma, s, b, e);
    v += t.kappa * d;
    err += std::abs(t.kappa) * e;
  }
  return v;
}

struct PieceContext {
  Kernel kernel;
  double s;
  double abs_target;
  double rel_target;
};

inline QuadResult to_quad(const PanelResult& p) { return {p.value, p.abs_err, p.panels}; }

inline QuadResult core_region(const Piece& piece, const PieceContext& c, double a, double b) {
  QuadResult out;
  struct Term { double coef; double p; };
  Term terms[2];
  switch (c.kernel) {
    case Kernel::one_minus_cos: terms[0] = {0.5, 2.0}; terms[1] = {-1.0 / 24.0, 4.0}; break;
    case Kernel::sin: terms[0] = {1.0, 1.0}; terms[1] = {-1.0 / 6.0, 3.0}; break;
    case Kernel::x_minus_sin: terms[0] = {1.0 / 6.0, 3.0}; terms[1] = {-1.0 / 120.0, 5.0}; break;
  }
  double mag = 0.0;
  for (const auto& t : terms) {
    const PanelResult m = moment(piece, t.p, a, b, c.s);
    out.value += t.coef * m.value;
    out.abs_err += std::abs(t.coef) * m.abs_err;
    out.panels += m.panels;
    mag += std::abs(t.coef * m.value);
  }
  // next omitted Taylor term is below (thr)^2/30 relative to the leading one
  const double thr = taylor_threshold(c.kernel);
  out.abs_err += mag * thr * thr / 30.0 + 4.0 * kEps * mag;
  return out;
}

inline QuadResult smooth_region(const Piece& piece, const PieceContext& c, double a, double b) {
  auto g = [&](double u) { return kernel_value(c.kernel, u) * formula_at(piece.formula, u / c.s) / c.s; };
  QuadResult out;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, 2.0 * lo);
    out += to_quad(detail::adaptive_gk(g, c.s * lo, c.s * hi, c.abs_target * 1e-2, c.rel_target));
    lo = hi;
  }
  return out;
}

// Direct half-period panels over [a, b].
inline QuadResult panel_region(const Piece& piece, const PieceContext& c, double a, double b) {
  auto g = [&](double u) { return kernel_value(c.kernel, u) * formula_at(piece.formula, u / c.s) / c.s; };
  QuadResult out;
  const double ua = c.s * a, ub = c.s * b;
  const double pi = std::numbers::pi;
  double lo = ua;
  double next = (std::floor(ua / pi) + 1.0) * pi;
  while (lo < ub) {
    const double hi = std::min(ub, next);
    out += to_quad(detail::adaptive_gk(g, lo, hi, c.abs_target * 1e-3, c.rel_target));
    lo = hi;
    next += pi;
  }
  return out;
}

inline QuadResult osc_region(const Piece& piece, const PieceContext& c, double a, double b,
                             double scale) {
  const double s = c.s;
  const double pi = std::numbers::pi;
  QuadResult out;

  if (auto terms = power_terms(piece.formula)) {
    const double split = std::clamp(kSeriesStart / s, a, b);
    if (split > a) out += panel_region(piece, c, a, split);
    if (b > split) {
      double err = 0.0;
      const std::complex<double> f = power_oscillatory(*terms, split, b, s, err);
      double v = 0.0;
      switch (c.kernel) {
        case Kernel::one_minus_cos: {
          const PanelResult m0 = moment(piece, 0.0, split, b, 1.0);
          v = m0.value - f.real();
          err += m0.abs_err;
          break;
        }
        case Kernel::sin:
          v = f.imag();
          break;
        case Kernel::x_minus_sin: {
          const PanelResult m1 = moment(piece, 1.0, split, b, s);
          v = m1.value - f.imag();
          err += m1.abs_err;
          break;
        }
      }
      out += QuadResult{v, err, 0};
    }
    return out;
  }

  if (!is_monotone_decreasing(piece.formula) || c.kernel == Kernel::x_minus_sin) {
    const double periods = (b - a) * s / pi;
    if (!std::isfinite(periods) || periods > static_cast<double>(kMaxOscPanels))
      throw DivergenceError("oscillatory region too long for direct panels");
    return panel_region(piece, c, a, b);
  }

  // Monotone density: direct panels up to X, then drop ∫_X^b rho e^{isx}
  // with |.| <= 2 rho(X) / s per component.
  const double budget = 0.25 * std::max(c.abs_target, c.rel_target * scale);
  auto bound_at = [&](double x) { return 2.0 * formula_at(piece.formula, x) / s; };
  const double k0 = std::ceil(a * s / pi);
  const double kmax = std::floor(b * s / pi);
  double x_cut = b;
  if (kmax > k0 && bound_at(k0 * pi / s) > budget) {
    double lo = k0, hi = kmax;
    if (bound_at(hi * pi / s) <= budget) {
      while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        if (bound_at(mid * pi / s) <= budget) hi = mid; else lo = mid;
      }
      x_cut = hi * pi / s;
    }
  } else if (kmax > k0) {
    x_cut = k0 * pi / s;
  }
  if ((x_cut - a) * s / pi > static_cast<double>(kMaxOscPanels))
    x_cut = a + static_cast<double>(kMaxOscPanels) * pi / s;
  if (x_cut > a) out += panel_region(piece, c, a, x_cut);
  if (b > x_cut) {
    double err = bound_at(x_cut);
    double v = 0.0;
    std::size_t panels = 0;
    if (c.kernel == Kernel::one_minus_cos) {
      const PanelResult m0 = moment(piece, 0.0, x_cut, b, 1.0);
      v = m0.value;
      err += m0.abs_err;
      panels = m0.panels;
    }
    out += QuadResult{v, err, panels};
  }
  return out;
}

inline QuadResult piece_integral(const Piece& piece, const PieceContext& c, double lo, double hi) {
  QuadResult out;
  if (!(hi > lo)) return out;
  const double x_t = taylor_threshold(c.kernel) / c.s;
  const double x_s = 1.0 / c.s;
  if (lo < x_t) out += core_region(piece, c, lo, std::min(hi, x_t));
  const double sa = std::max(lo, x_t), sb = std::min(hi, x_s);
  if (sb > sa) out += smooth_region(piece, c, sa, sb);
  const double oa = std::max(lo, x_s);
  if (hi > oa) out += osc_region(piece, c, oa, hi, std::abs(out.value));
  return out;
}

}  // namespace quad_detail

// ∫_lo^hi K(zx) rho(x) dx over the density's pieces on (0, inf). The mirror
// flag is not applied here; the exponent layer handles it.
// tol is a relative accuracy goal (an absolute floor of tol*1e-3 applies).
inline QuadResult integrate_kernel(const LevyDensity& d, Kernel kernel, double z, double tol,
                                   double lo = 0.0, double hi = kInf) {
  if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
  if (!std::isfinite(z)) throw PreconditionError("z must be finite");
  if (z == 0.0 || d.empty()) return {};
  const double s = std::abs(z);
  quad_detail::PieceContext ctx{kernel, s, tol * 1e-3, tol * 1e-2};
  QuadResult out;
  for (const auto& p : d.pieces) {
    const double a = std::max(lo, p.lo), b = std::min(hi, p.hi);
    if (b > a) out += quad_detail::piece_integral(p, ctx, a, b);
  }
  if (kernel != Kernel::one_minus_cos && z < 0.0) out.value = -out.value;
  if (kernel == Kernel::one_minus_cos) out.value = std::max(0.0, out.value);
  return out;
}

inline QuadResult integrate_one_minus_cos(const LevyDensity& d, double z, double tol = 1e-8) {
  return integrate_kernel(d, Kernel::one_minus_cos, z, tol);
}

inline QuadResult integrate_sin(const LevyDensity& d, double z, double tol = 1e-8) {
  return integrate_kernel(d, Kernel::sin, z, tol);
}

// ∫_0^hi (zx - sin zx) rho dx; hi defaults to the unit jump cutoff.
inline QuadResult integrate_x_minus_sin(const LevyDensity& d, double z, double tol = 1e-8,
                                        double hi = 1.0) {
  return integrate_kernel(d, Kernel::x_minus_sin, z, tol, 0.0, hi);
}

// ∫_lo^hi x^p rho dx.
inline QuadResult integrate_moment(const LevyDensity& d, double p, double lo, double hi) {
  QuadResult out;
  for (const auto& piece : d.pieces) {
    const double a = std::max(lo, piece.lo), b = std::min(hi, piece.hi);
    if (b > a) {
      const auto r = quad_detail::moment(piece, p, a, b, 1.0);
      out += QuadResult{r.value, r.abs_err, r.panels};
    }
  }
  return out;
}

}  // namespace huntkit
