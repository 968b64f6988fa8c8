#pragma once

// Finite test measures and the truncated energy functionals
//   ∫ W(A(z), B(z)) |nu^(z)|^2 dz
// evaluated against a triplet. Integrands are even in z, so everything is
// computed on [0, R] and doubled.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "huntkit/detail/gauss_kronrod.hpp"
#include "huntkit/errors.hpp"
#include "huntkit/exponent.hpp"
#include "huntkit/model.hpp"

namespace huntkit {

struct Atom {
  double location = 0.0;
  double weight = 1.0;
};

struct AtomsMeasure {
  std::vector<Atom> atoms;
};

struct GaussianMeasure {
  double mean = 0.0;
  double sd = 1.0;
  double mass = 1.0;
};

struct UniformMeasure {
  double lo = 0.0;
  double hi = 1.0;
  double mass = 1.0;
};

struct FiniteMeasure {
  std::variant<AtomsMeasure, GaussianMeasure, UniformMeasure> kind;
};

inline double total_mass(const FiniteMeasure& m) {
  return std::visit(detail::overloaded{
                        [](const AtomsMeasure& a) {
                          double s = 0.0;
                          for (const auto& x : a.atoms) s += x.weight;
                          return s;
                        },
                        [](const GaussianMeasure& g) { return g.mass; },
                        [](const UniformMeasure& u) { return u.mass; }},
                    m.kind);
}

inline void check_measure(const FiniteMeasure& m) {
  std::visit(detail::overloaded{
                 [](const AtomsMeasure& a) {
                   if (a.atoms.empty()) throw StructuralError("atoms measure needs at least one atom");
                   for (const auto& x : a.atoms)
                     if (!(x.weight > 0.0) || !std::isfinite(x.location))
                       throw StructuralError("atom weights must be > 0 and locations finite");
                 },
                 [](const GaussianMeasure& g) {
                   if (!(g.sd > 0.0) || !(g.mass > 0.0) || !std::isfinite(g.mean))
                     throw StructuralError("gaussian measure needs sd > 0, mass > 0");
                 },
                 [](const UniformMeasure& u) {
                   if (!(u.hi > u.lo) || !(u.mass > 0.0))
                     throw StructuralError("uniform measure needs lo < hi, mass > 0");
                 }},
             m.kind);
}

inline std::complex<double> fourier(const FiniteMeasure& m, double z) {
  return std::visit(
      detail::overloaded{
          [&](const AtomsMeasure& a) {
            std::complex<double> s{0.0, 0.0};
            for (const auto& x : a.atoms) s += x.weight * std::polar(1.0, z * x.location);
            return s;
          },
          [&](const GaussianMeasure& g) {
            return g.mass * std::exp(-0.5 * g.sd * g.sd * z * z) * std::polar(1.0, z * g.mean);
          },
          [&](const UniformMeasure& u) {
            // mass * e^{iz mid} * sin(z w/2)/(z w/2)
            const double h = 0.5 * z * (u.hi - u.lo);
            const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
            return u.mass * sinc * std::polar(1.0, 0.5 * z * (u.hi + u.lo));
          }},
      m.kind);
}

inline double fourier_sq(const FiniteMeasure& m, double z) { return std::norm(fourier(m, z)); }

// Upper bound on |nu^(z)|^2 used for tail estimates.
inline double fourier_sq_bound(const FiniteMeasure& m, double z) {
  const double mass = total_mass(m);
  return std::visit(detail::overloaded{
                        [&](const AtomsMeasure&) { return mass * mass; },
                        [&](const GaussianMeasure& g) { return mass * mass * std::exp(-g.sd * g.sd * z * z); },
                        [&](const UniformMeasure& u) {
                          const double w = u.hi - u.lo;
                          return std::min(mass * mass, 4.0 * mass * mass / (w * w * z * z));
                        }},
                    m.kind);
}

// Trapezoid step that resolves the oscillation of |nu^|^2.
inline double default_step(const FiniteMeasure& m) {
  constexpr double base = 0.05;
  return std::visit(detail::overloaded{
                        [&](const AtomsMeasure& a) {
                          double lo = a.atoms.front().location, hi = lo;
                          for (const auto& x : a.atoms) {
                            lo = std::min(lo, x.location);
                            hi = std::max(hi, x.location);
                          }
                          const double span = hi - lo;
                          return span > 0.0 ? std::min(base, 2.0 * std::numbers::pi / (40.0 * span)) : base;
                        },
                        [&](const GaussianMeasure& g) { return std::min(base, 0.1 / g.sd); },
                        [&](const UniformMeasure& u) {
                          return std::min(base, 2.0 * std::numbers::pi / (40.0 * (u.hi - u.lo)));
                        }},
                    m.kind);
}

// A and B on log-spaced nodes, interpolated linearly in (log z, log A/B).
class ExponentTable {
 public:
  ExponentTable() = default;
  ExponentTable(const LevyTriplet& t, double z_max, int per_decade = 100, double tol = 1e-8)
      : z0_(1e-3), step_(std::log(10.0) / per_decade) {
    if (!(z_max > z0_)) z_max = 2.0 * z0_;
    const std::size_t n = static_cast<std::size_t>(std::ceil(std::log(z_max / z0_) / step_)) + 2;
    std::vector<double> zs(n);
    for (std::size_t i = 0; i < n; ++i) zs[i] = z0_ * std::exp(step_ * static_cast<double>(i));
    values_ = eval_exponent_grid(t, zs, tol);
    log_a_.resize(n);
    log_b_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      log_a_[i] = std::log(values_[i].A);
      log_b_[i] = std::log(values_[i].B);
    }
  }

  double z_max() const { return values_.empty() ? 0.0 : values_.back().z; }
  const std::vector<ExponentValue>& nodes() const { return values_; }

  // (A, B) at |z|
  std::pair<double, double> at(double z) const {
    z = std::abs(z);
    if (values_.empty()) return {1.0, 1.0};
    if (z <= z0_) {
      const double f = z / z0_;
      return {1.0 + f * (values_[0].A - 1.0), 1.0 + f * (values_[0].B - 1.0)};
    }
    const double pos = std::log(z / z0_) / step_;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= values_.size()) i = values_.size() - 2;
    const double f = pos - static_cast<double>(i);
    return {std::exp(log_a_[i] + f * (log_a_[i + 1] - log_a_[i])),
            std::exp(log_b_[i] + f * (log_b_[i + 1] - log_b_[i]))};
  }

 private:
  double z0_ = 1e-3;
  double step_ = 0.0;
  std::vector<ExponentValue> values_;
  std::vector<double> log_a_, log_b_;
};

struct EnergyEstimate {
  double value_at_R = 0.0;
  double R = 0.0;
  std::optional<double> tail_bound;  // nullopt = unknown
  bool converged = false;
  double value_at_2R = 0.0;
};

struct EnergyOptions {
  double step = 0.0;  // trapezoid step; 0 picks default_step(m)
  int per_decade = 100;
  double tol = 1e-8;
  const ExponentTable* table = nullptr;  // reuse across calls; must cover 2R
};

// Weight W(A, B), nonincreasing in B for B >= A.
using Weight = std::function<double(double, double)>;

namespace weights {

inline Weight energy() {
  return [](double a, double b) { return a / (b * b); };
}
inline Weight c_lambda(double lambda) {
  return [lambda](double, double b) { return lambda / (lambda * lambda + b * b); };
}
inline Weight c_delta(double delta) {
  return [delta](double, double b) {
    const double l = std::log(2.0 + b);
    return 1.0 / (b * l * std::pow(std::log(l), 1.0 + delta));
  };
}
inline Weight log_band() {
  return [](double, double b) { return 1.0 / (b * std::log(b)); };
}
inline Weight loglog_band() {
  return [](double, double b) {
    const double l = std::log(b);
    return 1.0 / (b * l * std::log(l));
  };
}

}  // namespace weights

// Lower bound on A(z) for |z| >= 1: from the Gaussian part, and from the
// envelope via 1 - cos u >= u^2/4 on [0, 1].
inline std::optional<double> a_lower(const LevyTriplet& t, double z) {
  const auto& d = t.density;
  const bool jumps = !d.empty();
  if (jumps && !d.envelope && t.gaussian == 0.0) return std::nullopt;
  double lo = t.gaussian * z * z / 2.0;
  if (jumps && d.envelope) {
    const auto& e = *d.envelope;
    lo = std::max(lo, (d.mirror ? 2.0 : 1.0) * std::pow(std::abs(z), e.alpha1) / (8.0 * e.c));
  }
  return 1.0 + lo;
}

// 2 ∫_R^∞ bound|nu^|^2 W(A_lo, A_lo) dz, or nullopt when unknown; +inf when
// the bound does not decay.
inline std::optional<double> tail_bound(const FiniteMeasure& m, const LevyTriplet& t, const Weight& w,
                                        double R) {
  if (!a_lower(t, std::max(1.0, R))) return std::nullopt;
  auto f = [&](double z) {
    const double a = *a_lower(t, z);
    return fourier_sq_bound(m, z) * w(a, a);
  };
  double sum = 0.0;
  double lo = std::max(1.0, R);
  for (int j = 0; j < 400; ++j) {
    const double hi = 2.0 * lo;
    const double v = detail::adaptive_gk(f, lo, hi, 0.0, 1e-6).value;
    sum += v;
    if (j >= 3 && v <= 1e-9 * sum) return 2.0 * sum * (1.0 + 1e-6);
    if (!std::isfinite(hi)) break;
    lo = hi;
  }
  return std::numeric_limits<double>::infinity();
}

// Trapezoid estimate of ∫_{-R}^{R} W(A, B) |nu^|^2 at R and 2R.
inline EnergyEstimate truncated_functional(const FiniteMeasure& m, const LevyTriplet& t, const Weight& w,
                                           double R, const EnergyOptions& opt = {}) {
  if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("R must be positive and finite");
  check_measure(m);
  ExponentTable local;
  const ExponentTable* table = opt.table;
  if (!table || table->z_max() < 2.0 * R) {
    local = ExponentTable(t, 2.0 * R, opt.per_decade, opt.tol);
    table = &local;
  }
  const double step = opt.step > 0.0 ? opt.step : default_step(m);
  const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(R / step)));
  const double h = R / static_cast<double>(n);
  auto g = [&](double z) {
    const auto [a, b] = table->at(z);
    return w(a, b) * fourier_sq(m, z);
  };
  // integrand is even: 2 * trapezoid on [0, R]
  double inner = 0.5 * g(0.0);
  for (std::size_t i = 1; i < n; ++i) inner += g(h * static_cast<double>(i));
  const double g_r = g(R);
  double outer = 0.0;
  for (std::size_t i = n + 1; i < 2 * n; ++i) outer += g(h * static_cast<double>(i));
  const double g_2r = g(2.0 * R);

  EnergyEstimate e;
  e.R = R;
  e.value_at_R = 2.0 * h * (inner + 0.5 * g_r);
  e.value_at_2R = 2.0 * h * (inner + g_r + outer + 0.5 * g_2r);
  e.tail_bound = tail_bound(m, t, w, R);
  e.converged = e.tail_bound && std::abs(e.value_at_2R - e.value_at_R) <= 0.01 * e.value_at_2R &&
                *e.tail_bound <= 0.01 * e.value_at_R;
  return e;
}

inline EnergyEstimate one_energy(const FiniteMeasure& m, const LevyTriplet& t, double R = 1e4,
                                 const EnergyOptions& opt = {}) {
  return truncated_functional(m, t, weights::energy(), R, opt);
}

inline EnergyEstimate c_lambda(const FiniteMeasure& m, const LevyTriplet& t, double lambda, double R = 1e4,
                               const EnergyOptions& opt = {}) {
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be > 0");
  return truncated_functional(m, t, weights::c_lambda(lambda), R, opt);
}

inline EnergyEstimate condition_Cdelta(const FiniteMeasure& m, const LevyTriplet& t, double delta,
                                       double R = 1e4, const EnergyOptions& opt = {}) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be > 0");
  return truncated_functional(m, t, weights::c_delta(delta), R, opt);
}

inline EnergyEstimate condition_C0(const FiniteMeasure& m, const LevyTriplet& t, double R = 1e4,
                                   const EnergyOptions& opt = {}) {
  return truncated_functional(m, t, weights::c_delta(0.0), R, opt);
}

struct BandValue {
  std::size_t index = 0;
  double y_lo = 0.0;  // band is y_lo <= B < y_hi
  double y_hi = 0.0;
  double value = 0.0;
  double abs_err = 0.0;
  std::vector<std::pair<double, double>> z_intervals;  // on [0, R]; mirrored to negative z
  std::string status = "ok";                           // ok | empty | unreachable at desk scale
};

struct BandSum {
  double total = 0.0;
  double R = 0.0;
  std::vector<BandValue> bands;
  std::vector<double> harmonic_partial_sums;  // Σ_{j<=k} 1/x_j, loglog bands only
};

struct BandOptions {
  double tol = 1e-10;       // exponent accuracy inside band integrands
  double rel = 1e-12;       // Gauss–Kronrod relative target per panel
  int per_decade = 100;
  const ExponentTable* table = nullptr;
};

namespace band_detail {

inline double b_exact(const LevyTriplet& t, double z, double tol) { return eval_exponent(t, z, tol).B; }

// Sub-intervals of [0, R] where y_lo <= B(z) < y_hi. Crossings are located
// on the table nodes and refined by bisection on the exact B.
inline std::vector<std::pair<double, double>> band_intervals(const LevyTriplet& t, const ExponentTable& table,
                                                             double y_lo, double y_hi, double R, double tol) {
  std::vector<double> zs{0.0};
  std::vector<double> bs{1.0};
  for (const auto& v : table.nodes()) {
    if (v.z >= R) break;
    zs.push_back(v.z);
    bs.push_back(v.B);
  }
  zs.push_back(R);
  bs.push_back(b_exact(t, R, tol));

  std::vector<double> cuts{0.0};
  for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
    for (double y : {y_lo, y_hi}) {
      if ((bs[i] < y) == (bs[i + 1] < y)) continue;
      double a = zs[i], b = zs[i + 1];
      const bool rising = bs[i] < y;
      for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
        const double mid = 0.5 * (a + b);
        if ((b_exact(t, mid, tol) < y) == rising) a = mid; else b = mid;
      }
      cuts.push_back(0.5 * (a + b));
    }
  }
  cuts.push_back(R);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double bm = b_exact(t, 0.5 * (a + b), tol);
    if (bm >= y_lo && bm < y_hi) {
      if (!out.empty() && out.back().second == a) out.back().second = b;
      else out.emplace_back(a, b);
    }
  }
  return out;
}

inline BandValue integrate_band(const FiniteMeasure& m, const LevyTriplet& t, const Weight& w,
                                const ExponentTable& table, double y_lo, double y_hi, double R,
                                const BandOptions& opt) {
  BandValue bv;
  bv.y_lo = y_lo;
  bv.y_hi = y_hi;
  bv.z_intervals = band_intervals(t, table, y_lo, y_hi, R, opt.tol);
  if (bv.z_intervals.empty()) {
    bv.status = "empty";
    return bv;
  }
  auto g = [&](double z) {
    const auto v = eval_exponent(t, z, opt.tol);
    return w(v.A, v.B) * fourier_sq(m, z);
  };
  const double max_len = 20.0 * default_step(m);
  for (const auto& [a, b] : bv.z_intervals) {
    const double len = b - a;
    const std::size_t panels =
        std::min<std::size_t>(4096, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_len))));
    for (std::size_t k = 0; k < panels; ++k) {
      const double lo = a + len * static_cast<double>(k) / static_cast<double>(panels);
      const double hi = k + 1 == panels ? b : a + len * static_cast<double>(k + 1) / static_cast<double>(panels);
      const auto r = detail::adaptive_gk(g, lo, hi, 0.0, opt.rel);
      bv.value += 2.0 * r.value;
      bv.abs_err += 2.0 * r.abs_err;
    }
  }
  return bv;
}

inline const ExponentTable& table_for(const LevyTriplet& t, double R, const BandOptions& opt,
                                      ExponentTable& local) {
  if (opt.table && opt.table->z_max() >= R) return *opt.table;
  local = ExponentTable(t, R, opt.per_decade, 1e-8);
  return local;
}

}  // namespace band_detail

// Σ_k ∫_{y_k <= B < y_k^varsigma, |z| <= R} |nu^|^2 / (B log B) dz.
inline BandSum condition_Clog_sum(const FiniteMeasure& m, const LevyTriplet& t, double varsigma,
                                  const std::vector<double>& ys, double R = 1e4, const BandOptions& opt = {}) {
  if (!(varsigma > 1.0)) throw PreconditionError("varsigma must be > 1");
  if (!ys.empty() && !(ys.front() > 1.0)) throw PreconditionError("y_1 must be > 1");
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1])) throw PreconditionError("ys must be increasing");
  check_measure(m);
  ExponentTable local;
  const auto& table = band_detail::table_for(t, R, opt, local);
  const auto w = weights::log_band();
  auto bands = detail::parallel_map<BandValue>(ys.size(), [&](std::size_t k) {
    auto b = band_detail::integrate_band(m, t, w, table, ys[k], std::pow(ys[k], varsigma), R, opt);
    b.index = k + 1;
    return b;
  });
  BandSum out;
  out.R = R;
  for (const auto& b : bands) out.total += b.value;
  out.bands = std::move(bands);
  return out;
}

// N^varsigma_x = varsigma^(varsigma^x), as a log to detect overflow.
inline double log_n_varsigma(double varsigma, double x) { return std::pow(varsigma, x) * std::log(varsigma); }

// Σ_k ∫ over {N_{x_k} <= B < N_{x_k + 1}} of |nu^|^2 / (B log B loglog B) dz.
inline BandSum condition_Cloglog_sum(const FiniteMeasure& m, const LevyTriplet& t, double varsigma,
                                     const std::vector<double>& xs, double R = 1e4, const BandOptions& opt = {}) {
  if (!(varsigma > 1.0)) throw PreconditionError("varsigma must be > 1");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i - 1] + 1.0 < xs[i])) throw PreconditionError("need x_k + 1 < x_{k+1}");
  if (!xs.empty() && !(log_n_varsigma(varsigma, xs.front()) > 1.0))
    throw PreconditionError("need N_{x_1} > e");
  check_measure(m);
  ExponentTable local;
  const auto& table = band_detail::table_for(t, R, opt, local);
  const auto w = weights::loglog_band();
  constexpr double max_log = 709.0;
  auto bands = detail::parallel_map<BandValue>(xs.size(), [&](std::size_t k) {
    const double l_lo = log_n_varsigma(varsigma, xs[k]);
    const double l_hi = log_n_varsigma(varsigma, xs[k] + 1.0);
    BandValue b;
    if (l_lo > max_log) {
      b.status = "unreachable at desk scale";
      b.y_lo = b.y_hi = std::numeric_limits<double>::infinity();
    } else {
      const double y_hi = l_hi > max_log ? std::numeric_limits<double>::infinity() : std::exp(l_hi);
      b = band_detail::integrate_band(m, t, w, table, std::exp(l_lo), y_hi, R, opt);
    }
    b.index = k + 1;
    return b;
  });
  BandSum out;
  out.R = R;
  double h = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.total += bands[k].value;
    h += 1.0 / xs[k];
    out.harmonic_partial_sums.push_back(h);
  }
  out.bands = std::move(bands);
  return out;
}

}  // namespace huntkit
