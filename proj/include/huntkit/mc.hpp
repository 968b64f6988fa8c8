#pragma once

// Compound-Poisson simulation of a pure-jump subordinator with jumps below
// tau dropped, and an empirical characteristic function test against
// exp(-t psi(z)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "huntkit/detail/format.hpp"
#include "huntkit/detail/gauss_kronrod.hpp"
#include "huntkit/detail/parallel.hpp"
#include "huntkit/errors.hpp"
#include "huntkit/exponent.hpp"
#include "huntkit/model.hpp"
#include "huntkit/quad.hpp"

namespace huntkit {

inline constexpr const char* kRngId = "std::mt19937_64 seeded by std::seed_seq{seed_lo, seed_hi, chunk}";
inline constexpr std::size_t kChunk = 4096;

struct SampleBatch {
  double time = 0.0;
  double tau = 0.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  double bias_bound = 0.0;  // time * ∫_0^tau x rho
  double lambda = 0.0;      // ∫_tau^1 rho
  std::string rng = kRngId;
};

namespace mc_detail {

// Inverse CDF of rho restricted to one piece (lo, hi]. Non-power pieces
// carry a CDF table on geometric nodes; bisection then integrates only
// inside one cell.
struct JumpPiece {
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;
  Formula formula;
  std::vector<double> nodes;
  std::vector<double> cum;

  double density(double x) const { return formula_at(formula, x); }

  double power_cdf(double x) const {  // ∫_lo^x rho
    double v = 0.0;
    const auto terms = power_terms(formula);
    for (const auto& t : *terms) v += quad_detail::power_moment(t, 0.0, lo, x, 1.0);
    return v;
  }

  void prepare() {
    if (power_terms(formula)) {
      mass = power_cdf(hi);
      return;
    }
    constexpr int cells = 256;
    nodes.resize(cells + 1);
    cum.assign(cells + 1, 0.0);
    for (int i = 0; i <= cells; ++i) nodes[i] = lo * std::pow(hi / lo, static_cast<double>(i) / cells);
    nodes.back() = hi;
    auto f = [&](double y) { return density(y); };
    for (int i = 0; i < cells; ++i) cum[i + 1] = cum[i] + detail::adaptive_gk(f, nodes[i], nodes[i + 1], 0.0, 1e-13).value;
    mass = cum.back();
  }

  double sample(double u) const {
    const double target = u * mass;
    if (const auto* p = std::get_if<PowerLaw>(&formula)) {
      if (p->alpha == 0.0) return lo * std::pow(hi / lo, u);
      const double a = std::pow(lo, -p->alpha), b = std::pow(hi, -p->alpha);
      return std::clamp(std::pow(a - u * (a - b), -1.0 / p->alpha), lo, hi);
    }
    double a = lo, b = hi, base = 0.0;
    std::function<double(double)> partial = [&](double x) { return power_cdf(x); };
    if (!nodes.empty()) {
      const auto it = std::upper_bound(cum.begin(), cum.end(), target);
      const std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cum.begin(), 1) - 1, nodes.size() - 2);
      a = nodes[k];
      b = nodes[k + 1];
      base = cum[k];
      const double left = a;
      partial = [this, left, base](double x) {
        return base + detail::gauss_kronrod15([this](double y) { return density(y); }, left, x).value;
      };
    }
    while (b - a > 1e-12 * b) {
      const double m = 0.5 * (a + b);
      (partial(m) < target ? a : b) = m;
    }
    return 0.5 * (a + b);
  }
};

struct JumpLaw {
  std::vector<JumpPiece> pieces;
  std::vector<double> cumulative;  // normalized
  double lambda = 0.0;

  double sample(std::mt19937_64& g) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double v = u01(g);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), v);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), pieces.size() - 1);
    return pieces[k].sample(u01(g));
  }
};

inline JumpLaw jump_law(const LevyDensity& d, double tau) {
  JumpLaw law;
  for (const auto& p : restrict_to(d, tau, 1.0).pieces) {
    JumpPiece jp{p.lo, p.hi, 0.0, p.formula, {}, {}};
    jp.prepare();
    if (!std::isfinite(jp.mass) || jp.mass < 0.0) throw DivergenceError("jump mass above tau is not finite");
    if (jp.mass > 0.0) law.pieces.push_back(jp);
  }
  for (const auto& p : law.pieces) {
    law.lambda += p.mass;
    law.cumulative.push_back(law.lambda);
  }
  for (auto& c : law.cumulative) c /= law.lambda;
  return law;
}

}  // namespace mc_detail

// n values of X_time = a time + sum of Poisson(time lambda_tau) jumps in
// [tau, 1]. Chunks of kChunk paths have their own seeds, so output does not
// depend on the worker count.
inline SampleBatch sample_paths(const LevyTriplet& t, double time, double tau, std::size_t n, std::uint64_t seed) {
  if (t.form != ExponentForm::subordinator) throw PreconditionError("simulation needs subordinator form");
  if (t.gaussian != 0.0) throw PreconditionError("simulation needs q = 0");
  if (!(t.drift >= 0.0)) throw PreconditionError("simulation needs drift >= 0");
  if (t.density.mirror) throw PreconditionError("simulation needs a one-sided density");
  if (!(time > 0.0)) throw PreconditionError("time must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("tau must lie in (0, 1)");
  for (const auto& p : t.density.pieces)
    if (p.hi > 1.0) throw PreconditionError("density must be supported on (0, 1]");
  SampleBatch b;
  b.time = time;
  b.tau = tau;
  b.seed = seed;
  const auto law = mc_detail::jump_law(t.density, tau);
  b.lambda = law.lambda;
  b.bias_bound = time * integrate_moment(t.density, 1.0, 0.0, tau).value;
  if (!std::isfinite(b.bias_bound)) throw DivergenceError("∫_0^tau x rho diverges");
  b.values.assign(n, 0.0);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  detail::parallel_map<int>(chunks, [&](std::size_t c) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(c)};
    std::mt19937_64 g(ss);
    std::poisson_distribution<long> count(time * law.lambda);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      double x = t.drift * time;
      if (!law.pieces.empty())
        for (long k = count(g); k > 0; --k) x += law.sample(g);
      b.values[i] = x;
    }
    return 0;
  });
  return b;
}

struct EcfRow {
  double z = 0.0;
  std::complex<double> ecf;
  std::complex<double> model;
  double se_re = 0.0;
  double se_im = 0.0;
  double zscore_re = 0.0;
  double zscore_im = 0.0;
  double bias_allowance = 0.0;  // |z| * bias_bound
  bool excluded = false;        // allowance >= 0.1
  bool pass = false;
};

namespace mc_detail {

inline double zscore(double diff, double se) {
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace mc_detail

// Pass iff each component is within 4 standard errors plus |z| bias_bound.
inline std::vector<EcfRow> ecf_test(const SampleBatch& b, const LevyTriplet& t, const std::vector<double>& zs,
                                    double tol = 1e-10) {
  if (b.values.empty()) throw PreconditionError("empty batch");
  const double n = static_cast<double>(b.values.size());
  std::vector<EcfRow> rows;
  for (double z : zs) {
    EcfRow r;
    r.z = z;
    double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
    for (double x : b.values) {
      const double c = std::cos(z * x), s = std::sin(z * x);
      sc += c;
      ss += s;
      sc2 += c * c;
      ss2 += s * s;
    }
    r.ecf = {sc / n, ss / n};
    r.se_re = n > 1 ? std::sqrt(std::max(0.0, (sc2 - sc * sc / n) / (n - 1)) / n) : 0.0;
    r.se_im = n > 1 ? std::sqrt(std::max(0.0, (ss2 - ss * ss / n) / (n - 1)) / n) : 0.0;
    const auto v = eval_exponent(t, z, tol);
    r.model = std::exp(-b.time * std::complex<double>(v.psi_re, v.psi_im));
    const auto diff = r.ecf - r.model;
    r.zscore_re = mc_detail::zscore(diff.real(), r.se_re);
    r.zscore_im = mc_detail::zscore(diff.imag(), r.se_im);
    r.bias_allowance = std::abs(z) * b.bias_bound;
    r.excluded = r.bias_allowance >= 0.1;
    const double slack = 1e-12 + b.time * v.abs_err;
    r.pass = !r.excluded && std::abs(diff.real()) <= 4.0 * r.se_re + r.bias_allowance + slack &&
             std::abs(diff.imag()) <= 4.0 * r.se_im + r.bias_allowance + slack;
    rows.push_back(r);
  }
  return rows;
}

inline void write_ecf_csv(std::ostream& os, const std::vector<EcfRow>& rows) {
  using detail::g17;
  os << "z,ecf_re,ecf_im,model_re,model_im,zscore_re,zscore_im,pass\n";
  for (const auto& r : rows)
    os << g17(r.z) << ',' << g17(r.ecf.real()) << ',' << g17(r.ecf.imag()) << ',' << g17(r.model.real()) << ','
       << g17(r.model.imag()) << ',' << g17(r.zscore_re) << ',' << g17(r.zscore_im) << ','
       << (r.excluded ? "excluded" : r.pass ? "true" : "false") << '\n';
}

}  // namespace huntkit
