#pragma once

// Brute-force midpoint reference for the three exponent kernels. It uses
// only pointwise density evaluation and is deliberately simple: log-spaced
// panels below x = 1/|z|, uniform panels above. Slow; meant for tests.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "huntkit/model.hpp"

namespace huntkit {

struct OracleResult {
  double one_minus_cos = 0.0;  // ∫ (1 - cos zx) rho
  double sin = 0.0;            // ∫ sin(zx) rho
  double x_minus_sin = 0.0;    // ∫_{(0,1]} (zx - sin zx) rho
};

namespace oracle_detail {

// (1 - cos u)/u^2, sin(u)/u, (u - sin u)/u^3, all finite at u = 0.
inline double cos_ratio(double u) {
  if (std::abs(u) < 1e-4) return 0.5 - u * u / 24.0;
  const double h = std::sin(0.5 * u);
  return 2.0 * h * h / (u * u);
}
inline double sinc(double u) { return std::abs(u) < 1e-4 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }
inline double comp_ratio(double u) {
  if (std::abs(u) < 1e-2) {
    const double u2 = u * u;
    return 1.0 / 6.0 - u2 / 120.0 + u2 * u2 / 5040.0;
  }
  return (u - std::sin(u)) / (u * u * u);
}

// ∫_0^x g where g(t) ~ C t^beta near 0, beta read off g(x) and g(x/2).
inline double power_head(double gx, double gh, double x) {
  if (!(gx > 0.0) || !(gh > 0.0)) return 0.0;
  const double beta = std::log2(gx / gh);
  return beta > -1.0 ? gx * x / (beta + 1.0) : 0.0;
}

}  // namespace oracle_detail

// n is the total panel count per piece (split between the log and uniform
// regions). Pieces extending past cap are cut at cap. Below x_min the
// integrand is treated as a pure power of x. x_min <= 0 picks
// min(1e-12, 1/(1e3 max(1, |z|))).
inline OracleResult oracle_riemann(const LevyDensity& d, double z, std::size_t n = 10'000'000,
                                   double cap = kInf, double x_min = 0.0) {
  using namespace oracle_detail;
  OracleResult out;
  const double s = std::abs(z);
  if (s == 0.0) return out;
  if (!(x_min > 0.0)) x_min = std::min(1e-12, 1.0 / (1e3 * std::max(1.0, s)));
  const double x_s = 1.0 / s;
  // the compensator cutoff at x = 1 falls on a panel edge
  for (const auto& p : split_at(d, 1.0).pieces) {
    if (p.lo < x_min) {
      const double h = std::min(x_min, p.hi);
      auto w = [&](double x, double q) { return weighted_at(p.formula, x, q); };
      out.one_minus_cos += s * s * cos_ratio(s * h) * power_head(w(h, 2.0), w(0.5 * h, 2.0), h);
      out.sin += s * sinc(s * h) * power_head(w(h, 1.0), w(0.5 * h, 1.0), h);
      out.x_minus_sin += s * s * s * comp_ratio(s * h) * power_head(w(h, 3.0), w(0.5 * h, 3.0), h);
    }
    const double lo = std::max(p.lo, x_min);
    const double hi = std::min(p.hi, cap);
    if (!(hi > lo)) continue;
    const bool has_log = lo < x_s;
    const bool has_lin = hi > x_s;
    const std::size_t n_log = has_log ? (has_lin ? n / 2 : n) : 0;
    const std::size_t n_lin = has_lin ? n - n_log : 0;
    double c = 0.0, sn = 0.0, cm = 0.0;
    // Each term is written with x^p rho to stay finite near 0.
    auto accumulate = [&](double x, double w) {
      const double u = s * x;
      c += w * s * s * cos_ratio(u) * weighted_at(p.formula, x, 2.0);
      sn += w * s * sinc(u) * weighted_at(p.formula, x, 1.0);
      if (x <= 1.0) cm += w * s * s * s * comp_ratio(u) * weighted_at(p.formula, x, 3.0);
    };
    if (n_log > 0) {
      const double t0 = std::log(lo), t1 = std::log(std::min(hi, x_s));
      const double h = (t1 - t0) / static_cast<double>(n_log);
      for (std::size_t i = 0; i < n_log; ++i) {
        const double x = std::exp(t0 + (static_cast<double>(i) + 0.5) * h);
        accumulate(x, h * x);
      }
    }
    if (n_lin > 0) {
      const double a = std::max(lo, x_s);
      const double h = (hi - a) / static_cast<double>(n_lin);
      for (std::size_t i = 0; i < n_lin; ++i) {
        const double x = a + (static_cast<double>(i) + 0.5) * h;
        accumulate(x, h);
      }
    }
    out.one_minus_cos += c;
    out.sin += sn;
    out.x_minus_sin += cm;
  }
  if (z < 0.0) {
    out.sin = -out.sin;
    out.x_minus_sin = -out.x_minus_sin;
  }
  return out;
}

}  // namespace huntkit
