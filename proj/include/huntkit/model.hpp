#pragma once

// Lévy triplets and piecewise Lévy densities on (0, inf), with structural
// validation.
//
// A density is an ordered list of pieces, each living on a half-open
// interval (lo, hi]. Pieces carry one of a small set of closed-form formulas
// (or an opaque callable that must come with envelope bounds). The `mirror`
// flag turns the one-sided density into the symmetric two-sided measure
// rho(|x|) dx on R \ {0}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "huntkit/detail/gauss_kronrod.hpp"
#include "huntkit/errors.hpp"

namespace huntkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// kappa * x^(-1-alpha)
struct PowerLaw {
  double kappa = 1.0;
  double alpha = 0.5;
};

/// Sum of power laws. Individual coefficients may be negative as long as
/// the sum stays nonnegative on the piece.
struct PowerSum {
  std::vector<PowerLaw> terms;
};

/// c * [log(-log x)]^delta / x^2 for 0 < x < 1/e, zero elsewhere.
struct LogLog {
  double c = 1.0;
  double delta = 1.0;
};

/// Opaque callable. Requires a declared density envelope and a finite upper
/// bound. `monotone` asserts the callable is nonincreasing on the piece,
/// which allows variation bounds and oscillatory tail truncation.
struct Tabulated {
  std::function<double(double)> fn;
  bool monotone = false;
};

using Formula = std::variant<PowerLaw, PowerSum, LogLog, Tabulated>;

struct Piece {
  double lo = 0.0;
  double hi = 1.0;
  Formula formula;
};

/// Sandwich 1/(c x^{1+alpha1}) <= rho(x) <= c / x^{1+alpha2} on (0, 1].
struct Envelope {
  double c = 1.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

struct LevyDensity {
  std::vector<Piece> pieces;
  std::optional<Envelope> envelope;
  bool mirror = false;

  bool empty() const { return pieces.empty(); }
};

/// Which Lévy–Khintchine convention the triplet uses.
///
/// levy_khintchine: psi(z) = i a z + q z^2/2 + ∫ (1 - e^{izx} + i z x 1{|x|<1}) mu(dx)
/// subordinator:    psi(z) = -i a z + ∫ (1 - e^{izx}) mu(dx), i.e. X_t = a t + jumps.
enum class ExponentForm { levy_khintchine, subordinator };

struct LevyTriplet {
  double drift = 0.0;
  double gaussian = 0.0;
  LevyDensity density;
  ExponentForm form = ExponentForm::levy_khintchine;
};

struct ExponentValue {
  double z = 0.0;
  double psi_re = 0.0;
  double psi_im = 0.0;
  double A = 1.0;
  double B = 1.0;
  double abs_err = 0.0;  // err(psi_re) + err(psi_im)
  double re_err = 0.0;
  double im_err = 0.0;
};

// ---------------------------------------------------------------------------
// pointwise evaluation

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double loglog_weighted(const LogLog& f, double x, double p) {
  if (!(x < std::exp(-1.0))) return 0.0;
  const double l = std::log(-std::log(x));
  if (l <= 0.0) return 0.0;
  return f.c * std::pow(l, f.delta) * std::pow(x, p - 2.0);
}

}  // namespace detail

/// x^p * formula(x), evaluated without forming x^(-1-alpha) separately so
/// that moments near zero do not overflow.
inline double weighted_at(const Formula& f, double x, double p) {
  return std::visit(
      detail::overloaded{
          [&](const PowerLaw& t) { return t.kappa * std::pow(x, p - 1.0 - t.alpha); },
          [&](const PowerSum& s) {
            double v = 0.0;
            for (const auto& t : s.terms) v += t.kappa * std::pow(x, p - 1.0 - t.alpha);
            return v;
          },
          [&](const LogLog& l) { return detail::loglog_weighted(l, x, p); },
          [&](const Tabulated& t) { return std::pow(x, p) * t.fn(x); }},
      f);
}

inline double formula_at(const Formula& f, double x) { return weighted_at(f, x, 0.0); }

/// Power-law terms of a symbolic formula, or nullopt for other kinds.
inline std::optional<std::vector<PowerLaw>> power_terms(const Formula& f) {
  if (const auto* p = std::get_if<PowerLaw>(&f)) return std::vector<PowerLaw>{*p};
  if (const auto* s = std::get_if<PowerSum>(&f)) return s->terms;
  return std::nullopt;
}

inline bool is_monotone_decreasing(const Formula& f) {
  return std::visit(detail::overloaded{
                        [](const PowerLaw& t) { return t.kappa == 0.0 || t.alpha >= -1.0; },
                        [](const PowerSum& s) {
                          return std::all_of(s.terms.begin(), s.terms.end(), [](const PowerLaw& t) {
                            return t.kappa >= 0.0 && t.alpha >= -1.0;
                          });
                        },
                        [](const LogLog& l) { return l.c >= 0.0 && l.delta >= 0.0; },
                        [](const Tabulated& t) { return t.monotone; }},
                    f);
}

inline std::string formula_kind(const Formula& f) {
  return std::visit(detail::overloaded{[](const PowerLaw&) { return std::string("power"); },
                                       [](const PowerSum&) { return std::string("powersum"); },
                                       [](const LogLog&) { return std::string("loglog"); },
                                       [](const Tabulated&) { return std::string("tabulated"); }},
                    f);
}

/// Density value at x > 0; zero outside every piece.
inline double density_at(const LevyDensity& d, double x) {
  if (!(x > 0.0)) throw DomainError("density_at: x must be > 0");
  for (const auto& piece : d.pieces) {
    if (x > piece.lo && x <= piece.hi) return formula_at(piece.formula, x);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// piece manipulation

/// Copy of `d` with every piece clipped to (lo, hi]. Envelope and mirror kept.
inline LevyDensity restrict_to(const LevyDensity& d, double lo, double hi) {
  LevyDensity out;
  out.envelope = d.envelope;
  out.mirror = d.mirror;
  for (const auto& p : d.pieces) {
    const double l = std::max(p.lo, lo);
    const double h = std::min(p.hi, hi);
    if (h > l) out.pieces.push_back({l, h, p.formula});
  }
  return out;
}

/// Same density with pieces straddling `x` cut in two.
inline LevyDensity split_at(const LevyDensity& d, double x) {
  LevyDensity out;
  out.envelope = d.envelope;
  out.mirror = d.mirror;
  for (const auto& p : d.pieces) {
    if (p.lo < x && x < p.hi) {
      out.pieces.push_back({p.lo, x, p.formula});
      out.pieces.push_back({x, p.hi, p.formula});
    } else {
      out.pieces.push_back(p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// validation

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct ValidationOptions {
  int sample_points = 64;   // per piece, for the nonnegativity scan
  int envelope_points = 400;
  double doubling_rel = 1e-4;
};

/// Throws StructuralError for malformed piece lists.
inline void check_structure(const LevyDensity& d) {
  const double one_over_e = std::exp(-1.0);
  double prev_hi = 0.0;
  for (std::size_t i = 0; i < d.pieces.size(); ++i) {
    const auto& p = d.pieces[i];
    std::ostringstream where;
    where << "piece " << i << " (" << p.lo << ", " << p.hi << "]";
    if (!std::isfinite(p.lo) || p.lo < 0.0 || std::isnan(p.hi))
      throw StructuralError(where.str() + ": bounds must satisfy 0 <= lo, finite lo");
    if (!(p.hi > p.lo)) throw StructuralError(where.str() + ": empty interval (hi <= lo)");
    if (i > 0 && p.lo < prev_hi)
      throw StructuralError(where.str() + ": overlaps or is out of order with previous piece");
    prev_hi = p.hi;
    if (std::holds_alternative<LogLog>(p.formula) && p.hi > one_over_e * (1.0 + 1e-12))
      throw StructuralError(where.str() + ": loglog pieces must lie in (0, 1/e)");
    if (const auto* t = std::get_if<Tabulated>(&p.formula)) {
      if (!t->fn) throw StructuralError(where.str() + ": tabulated piece without callable");
      if (!std::isfinite(p.hi)) throw StructuralError(where.str() + ": tabulated piece must be bounded");
      if (!d.envelope) throw StructuralError(where.str() + ": tabulated piece requires a declared envelope");
    }
  }
}

namespace detail {

// Integral of x^p rho over (2^{-j-1}, 2^{-j}] (toward zero) or
// (2^j, 2^{j+1}] (toward infinity), restricted to the piece.
inline double dyadic_panel(const Piece& piece, double p, double a, double b) {
  const double l = std::max(a, piece.lo);
  const double h = std::min(b, piece.hi);
  if (!(h > l)) return 0.0;
  auto f = [&](double x) { return weighted_at(piece.formula, x, p); };
  return adaptive_gk(f, l, h, 0.0, 1e-10).value;
}

enum class Tail { zero, infinity };

// Nested dyadic sums with doubling panel counts; stops when the relative
// change falls below `rel`. When the doubling rule does not settle, a
// geometric-ratio test on the last blocks decides convergence.
inline bool dyadic_converges(const Piece& piece, double p, Tail tail, double rel) {
  std::vector<double> panels;
  auto panel = [&](int j) {
    if (tail == Tail::zero) return dyadic_panel(piece, p, std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j));
    return dyadic_panel(piece, p, std::ldexp(1.0, j), std::ldexp(1.0, j + 1));
  };
  double sum = 0.0;
  double prev = 0.0;
  int count = 0;
  for (int target = 8; target <= 1000; target *= 2) {
    while (count < target) {
      const double v = panel(count++);
      panels.push_back(v);
      sum += v;
    }
    if (target > 8 && std::abs(sum - prev) <= rel * std::abs(sum)) return true;
    if (sum == 0.0 && prev == 0.0 && target > 8) return true;
    prev = sum;
  }
  while (count < 1000) {
    const double v = panel(count++);
    panels.push_back(v);
    sum += v;
  }
  // Geometric ratio over the last two blocks of 64 panels.
  double b1 = 0.0, b2 = 0.0;
  for (int j = 1000 - 128; j < 1000 - 64; ++j) b1 += std::abs(panels[j]);
  for (int j = 1000 - 64; j < 1000; ++j) b2 += std::abs(panels[j]);
  if (b1 == 0.0) return true;
  const double ratio = std::pow(b2 / b1, 1.0 / 64.0);
  return ratio < 1.0 - 1e-6;
}

}  // namespace detail

/// Lists every violated invariant; throws StructuralError on malformed pieces.
inline ValidationReport validate_triplet(const LevyTriplet& t, const ValidationOptions& opt = {}) {
  ValidationReport rep;
  auto& v = rep.violations;
  const auto& d = t.density;
  check_structure(d);

  if (!std::isfinite(t.drift)) v.push_back("drift is not finite");
  if (!std::isfinite(t.gaussian) || t.gaussian < 0.0) v.push_back("gaussian coefficient must be finite and >= 0");

  for (std::size_t i = 0; i < d.pieces.size(); ++i) {
    const auto& p = d.pieces[i];
    const std::string tag = "piece " + std::to_string(i);
    if (const auto* l = std::get_if<LogLog>(&p.formula)) {
      if (!(l->c > 0.0)) v.push_back(tag + ": loglog c must be > 0");
    }
    if (const auto* w = std::get_if<PowerLaw>(&p.formula)) {
      if (!(w->kappa >= 0.0)) v.push_back(tag + ": power kappa must be >= 0");
    }
    // nonnegativity scan on a log grid inside the piece
    const double hi = std::isfinite(p.hi) ? p.hi : std::max(1.0, p.lo) * 1e6;
    const double lo = p.lo > 0.0 ? p.lo : std::min(hi, 1.0) * 1e-12;
    for (int k = 0; k < opt.sample_points; ++k) {
      const double x = lo * std::pow(hi / lo, (k + 0.5) / opt.sample_points);
      const double r = formula_at(p.formula, x);
      if (!(r >= 0.0)) {
        std::ostringstream os;
        os << tag << ": density negative or NaN at x=" << x;
        v.push_back(os.str());
        break;
      }
    }
  }

  // integrability of (1 ∧ x^2) rho, and of (1 ∧ x) rho in subordinator form
  const LevyDensity split = split_at(d, 1.0);
  for (const auto& p : split.pieces) {
    if (p.lo == 0.0) {
      if (!detail::dyadic_converges(p, 2.0, detail::Tail::zero, opt.doubling_rel))
        v.push_back("∫x²ρ dx diverges near 0");
      else if (t.form == ExponentForm::subordinator &&
               !detail::dyadic_converges(p, 1.0, detail::Tail::zero, opt.doubling_rel))
        v.push_back("∫xρ dx diverges near 0 (subordinator form needs finite variation)");
    }
    if (!std::isfinite(p.hi) &&
        !detail::dyadic_converges(p, 0.0, detail::Tail::infinity, opt.doubling_rel))
      v.push_back("∫ρ dx diverges at infinity");
  }

  if (d.envelope) {
    const auto& e = *d.envelope;
    if (!(e.c > 0.0) || !(e.alpha1 <= e.alpha2)) {
      v.push_back("envelope requires c > 0 and alpha1 <= alpha2");
    } else {
      const int n = opt.envelope_points;
      for (int k = 0; k < n; ++k) {
        const double x = std::pow(10.0, -12.0 + 12.0 * k / (n - 1));
        const double r = density_at(d, x);
        const double lower = 1.0 / (e.c * std::pow(x, 1.0 + e.alpha1));
        const double upper = e.c / std::pow(x, 1.0 + e.alpha2);
        if (r < lower * (1.0 - 1e-12) || r > upper * (1.0 + 1e-12)) {
          std::ostringstream os;
          os << "envelope sandwich fails at x=" << x << " (rho=" << r << ", bounds [" << lower << ", "
             << upper << "])";
          v.push_back(os.str());
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace huntkit
