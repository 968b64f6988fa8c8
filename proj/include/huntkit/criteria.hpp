#pragma once

// Measure-free criterion checks over z-windows. Every verdict is evidence
// on the sampled window, never an asymptotic proof.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "huntkit/errors.hpp"
#include "huntkit/exponent.hpp"
#include "huntkit/model.hpp"

namespace huntkit {

struct Window {
  double z_lo = 1.0;
  double z_hi = 1e6;
  std::size_t n = 400;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw PreconditionError("log grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> window_grid(const Window& w) {
  if (!(w.z_lo > 0.0) || !(w.z_hi > w.z_lo) || w.n < 2) throw PreconditionError("window must be nonempty");
  return log_grid(w.z_lo, w.z_hi, w.n);
}

namespace verdict {
inline constexpr const char* holds = "holds-with-constant";
inline constexpr const char* violated = "violated-at";
inline constexpr const char* unbounded = "inconclusive-unbounded";
inline constexpr const char* inconclusive = "inconclusive";
}  // namespace verdict

struct CriterionReport {
  std::string criterion;
  Window window;
  std::string verdict = verdict::inconclusive;
  double constant = 0.0;
  double witness_z = 0.0;
  std::size_t excluded_points = 0;  // e.g. B <= e in log-ratio denominators
  std::vector<std::string> notes;
  std::vector<double> diagnostics;
  std::vector<std::pair<double, double>> samples;  // (z, ratio) behind the constant
};

namespace criteria_detail {

// Max with lowest-index witness; NaN ratios are skipped.
inline std::pair<double, std::size_t> arg_max(const std::vector<double>& r) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] > best) {
      best = r[i];
      at = i;
    }
  return {best, at};
}

// Growth in the last quarter of a log-spaced window flags unboundedness.
inline bool grows(const std::vector<double>& r) {
  if (r.size() < 8) return false;
  const std::size_t cut = r.size() * 3 / 4;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < cut; ++i) head = std::max(head, r[i]);
  for (std::size_t i = cut; i < r.size(); ++i) tail = std::max(tail, r[i]);
  return tail > 1.5 * head && tail > 0.0;
}

inline CriterionReport sup_report(std::string name, const Window& w, const std::vector<double>& zs,
                                  const std::vector<double>& ratios) {
  CriterionReport rep;
  rep.criterion = std::move(name);
  rep.window = w;
  const auto [best, at] = arg_max(ratios);
  rep.constant = std::max(0.0, best);
  rep.witness_z = zs.empty() ? 0.0 : zs[at];
  rep.verdict = grows(ratios) ? verdict::unbounded : verdict::holds;
  rep.notes.push_back("window evidence only");
  for (std::size_t i = 0; i < zs.size(); ++i) rep.samples.emplace_back(zs[i], ratios[i]);
  return rep;
}

}  // namespace criteria_detail

// M = sup |Im psi| / A.
inline CriterionReport kanda_forst(const LevyTriplet& t, const Window& w = {}, double tol = 1e-8) {
  const auto zs = window_grid(w);
  const auto vs = eval_exponent_grid(t, zs, tol);
  std::vector<double> r(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) r[i] = std::abs(vs[i].psi_im) / vs[i].A;
  return criteria_detail::sup_report("kanda_forst", w, zs, r);
}

// sup |Im psi| / (A f(A)); f must be positive and nondecreasing on [1, inf).
inline CriterionReport rao_check(const LevyTriplet& t, const std::function<double(double)>& f,
                                 const Window& w = {}, double tol = 1e-8) {
  const auto zs = window_grid(w);
  const auto vs = eval_exponent_grid(t, zs, tol);
  std::vector<double> as;
  for (const auto& v : vs) as.push_back(v.A);
  for (double x : log_grid(1.0, std::max(2.0, *std::max_element(as.begin(), as.end())), 256)) as.push_back(x);
  std::sort(as.begin(), as.end());
  double prev = 0.0;
  for (double a : as) {
    const double fa = f(a);
    if (!(fa > 0.0)) throw PreconditionError("f must be positive on [1, inf)");
    if (fa < prev) throw PreconditionError("f must be nondecreasing on the sampled points");
    prev = fa;
  }
  std::vector<double> r(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) r[i] = std::abs(vs[i].psi_im) / (vs[i].A * f(vs[i].A));
  auto rep = criteria_detail::sup_report("rao", w, zs, r);
  // ∫_1^{2^k} dλ/(λ f(λ)) for k = 1, 2, 4, ..., 512 by the midpoint rule in log λ
  double s = 0.0;
  const double h = std::log(2.0) / 64.0;
  for (int k = 0, next = 1; k < 512; ++k) {
    for (int j = 0; j < 64; ++j) s += h / f(std::exp(std::log(2.0) * k + (j + 0.5) * h));
    if (k + 1 == next) {
      rep.diagnostics.push_back(s);
      next *= 2;
    }
  }
  rep.notes.push_back("divergence of ∫ dλ/(λ f(λ)) is asymptotic, user-asserted; diagnostics hold partial integrals to 2^(2^j)");
  return rep;
}

// C = sup B / (A log(2+B) loglog(2+B)).
inline CriterionReport cba_check(const LevyTriplet& t, const Window& w = {}, double tol = 1e-8) {
  const auto zs = window_grid(w);
  const auto vs = eval_exponent_grid(t, zs, tol);
  std::vector<double> r(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double l = std::log(2.0 + vs[i].B);
    r[i] = vs[i].B / (vs[i].A * l * std::log(l));
  }
  return criteria_detail::sup_report("cba", w, zs, r);
}

// c = sup |psi_1| / (1 + Re psi_2).
inline CriterionReport perturbation_check(const LevyTriplet& t1, const LevyTriplet& t2, const Window& w = {},
                                          double tol = 1e-8) {
  const auto zs = window_grid(w);
  const auto v1 = eval_exponent_grid(t1, zs, tol);
  const auto v2 = eval_exponent_grid(t2, zs, tol);
  std::vector<double> r(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) r[i] = std::hypot(v1[i].psi_re, v1[i].psi_im) / v2[i].A;
  return criteria_detail::sup_report("perturbation", w, zs, r);
}

// B <= kappa A log B on each band (z_lo, z_hi), sampled at `points` log points.
inline CriterionReport band_ratio(const LevyTriplet& t, double kappa,
                                  const std::vector<std::pair<double, double>>& bands, std::size_t points = 50,
                                  double tol = 1e-8) {
  auto sorted = bands;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i].first >= 1.0) || !(sorted[i].second > sorted[i].first))
      throw PreconditionError("bands need 1 <= z_lo < z_hi");
    if (i > 0 && sorted[i].first < sorted[i - 1].second) throw PreconditionError("bands must be disjoint");
  }
  CriterionReport rep;
  rep.criterion = "band_ratio";
  rep.verdict = verdict::holds;
  if (!sorted.empty()) rep.window = {sorted.front().first, sorted.back().second, points * sorted.size()};
  std::vector<double> zs;
  for (const auto& [lo, hi] : sorted) {
    // half-open band: stop just short of z_hi
    for (double z : log_grid(lo, hi, points + 1)) zs.push_back(z);
    zs.pop_back();
  }
  const auto vs = detail::parallel_map<ExponentValue>(zs.size(), [&](std::size_t i) { return eval_exponent(t, zs[i], tol); });
  const double e = std::exp(1.0);
  bool first_violation = true;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].B <= e) {
      ++rep.excluded_points;
      continue;
    }
    const double r = vs[i].B / (vs[i].A * std::log(vs[i].B));
    rep.samples.emplace_back(zs[i], r);
    if (r > rep.constant) {
      rep.constant = r;
      if (rep.verdict == verdict::holds) rep.witness_z = zs[i];
    }
    if (r > kappa && first_violation) {
      rep.verdict = verdict::violated;
      rep.witness_z = zs[i];
      first_violation = false;
    }
  }
  if (rep.excluded_points > 0) rep.notes.push_back("points with B <= e excluded from the log ratio");
  if (sorted.empty()) rep.notes.push_back("no bands: vacuous");
  return rep;
}

// |z|^a1 / c <= A <= B <= c |z|^a2 on a window with |z| >= 1.
inline CriterionReport envelope_check(const LevyTriplet& t, double alpha1, double alpha2, double c,
                                      const Window& w = {}, double tol = 1e-8) {
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 <= 2.0)) throw PreconditionError("need 0 < alpha1 < alpha2 <= 2");
  if (!(c > 1.0)) throw PreconditionError("need c > 1");
  if (!(w.z_lo >= 1.0)) throw PreconditionError("envelope window needs |z| >= 1");
  const auto zs = window_grid(w);
  const auto vs = eval_exponent_grid(t, zs, tol);
  CriterionReport rep;
  rep.criterion = "envelope";
  rep.window = w;
  rep.verdict = verdict::holds;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double z = zs[i];
    // smallest c that works at this point
    const double need = std::max(std::pow(z, alpha1) / vs[i].A, vs[i].B / std::pow(z, alpha2));
    rep.samples.emplace_back(z, need);
    if (need > rep.constant) {
      rep.constant = need;
      if (rep.verdict == verdict::holds) rep.witness_z = z;
    }
    const bool ok = vs[i].A >= std::pow(z, alpha1) / c && vs[i].A <= vs[i].B && vs[i].B <= c * std::pow(z, alpha2);
    if (!ok && rep.verdict == verdict::holds) {
      rep.verdict = verdict::violated;
      rep.witness_z = z;
    }
  }
  return rep;
}

struct LiminfReport {
  double delta = 0.0;
  std::vector<std::pair<double, double>> decade_infima;  // (decade start, inf of ratio in decade)
  std::string verdict;                                   // evidence-positive | evidence-negative
  std::vector<std::string> notes;
};

// Per-decade infima of |psi| / (|z| (loglog|z|)^delta). Positive evidence
// when the last three decade infima are nondecreasing within 5%.
inline LiminfReport liminf_loglog(const LevyTriplet& t, double delta, const std::vector<double>& zs,
                                  double tol = 1e-8) {
  const double zmin = std::exp(std::exp(1.0));
  for (double z : zs)
    if (!(z >= zmin)) throw PreconditionError("liminf_loglog needs z >= e^e");
  LiminfReport rep;
  rep.delta = delta;
  const auto vs = detail::parallel_map<ExponentValue>(zs.size(), [&](std::size_t i) { return eval_exponent(t, zs[i], tol); });
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double z = zs[i];
    const double r = std::hypot(vs[i].psi_re, vs[i].psi_im) / (z * std::pow(std::log(std::log(z)), delta));
    const double dec = std::pow(10.0, std::floor(std::log10(z)));
    if (rep.decade_infima.empty() || rep.decade_infima.back().first != dec) rep.decade_infima.emplace_back(dec, r);
    else rep.decade_infima.back().second = std::min(rep.decade_infima.back().second, r);
  }
  const auto& d = rep.decade_infima;
  bool positive = d.size() >= 3;
  for (std::size_t i = d.size() >= 3 ? d.size() - 2 : d.size(); positive && i < d.size(); ++i)
    positive = d[i].second >= 0.95 * d[i - 1].second && d[i].second > 0.0;
  rep.verdict = positive ? "evidence-positive" : "evidence-negative";
  rep.notes.push_back("trend on a finite window, never a proof");
  if (d.size() < 3) rep.notes.push_back("fewer than 3 decades sampled");
  return rep;
}

struct BGIndexes {
  double beta_hat = 0.0;
  double beta2_hat = 0.0;
  double beta_ls = 0.0;  // least-squares slopes over the upper half of the window
  double beta2_ls = 0.0;
  double beta_stderr = 0.0;
  double beta2_stderr = 0.0;
  std::vector<double> local_beta;  // per-decade slopes of log|psi|
  std::vector<double> local_beta2;  // per-decade slopes of log Re psi
  std::string warning;
};

namespace criteria_detail {

struct Fit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

inline Fit ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return {};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - my - f.slope * (x[i] - mx);
      ss += e * e;
    }
    f.stderr_ = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

}  // namespace criteria_detail

// Blumenthal–Getoor index estimates. With consistent per-decade slopes the
// tail least-squares slopes are reported. Otherwise (band-dependent growth)
// beta is the largest per-decade slope of log|psi| and beta'' the smallest
// value of log Re psi / log|z| over |z| >= 10, and a warning is set.
inline BGIndexes bg_indexes(const LevyTriplet& t, const Window& w = {}, double tol = 1e-8) {
  if (!(w.z_lo > 0.0) || !(w.z_hi >= 1e3 * w.z_lo)) throw PreconditionError("window must span at least 3 decades");
  const auto zs = window_grid(w);
  const auto vs = eval_exponent_grid(t, zs, tol);
  std::vector<double> lz, lpsi, lre;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    lz.push_back(std::log(zs[i]));
    lpsi.push_back(std::log(std::hypot(vs[i].psi_re, vs[i].psi_im)));
    lre.push_back(std::log(vs[i].psi_re));
  }
  BGIndexes out;
  const std::size_t half = zs.size() / 2;
  auto tail = [&](const std::vector<double>& v) { return std::vector<double>(v.begin() + half, v.end()); };
  const auto fb = criteria_detail::ls_slope(tail(lz), tail(lpsi));
  const auto f2 = criteria_detail::ls_slope(tail(lz), tail(lre));
  out.beta_ls = fb.slope;
  out.beta2_ls = f2.slope;
  out.beta_stderr = fb.stderr_;
  out.beta2_stderr = f2.stderr_;
  // per-decade slopes
  const double ln10 = std::log(10.0);
  for (double d0 = lz.front(); d0 + ln10 <= lz.back() + 1e-9; d0 += ln10) {
    std::vector<double> x, yb, y2;
    for (std::size_t i = 0; i < lz.size(); ++i)
      if (lz[i] >= d0 - 1e-12 && lz[i] <= d0 + ln10 + 1e-12) {
        x.push_back(lz[i]);
        yb.push_back(lpsi[i]);
        y2.push_back(lre[i]);
      }
    out.local_beta.push_back(criteria_detail::ls_slope(x, yb).slope);
    out.local_beta2.push_back(criteria_detail::ls_slope(x, y2).slope);
  }
  const auto [lo2, hi2] = std::minmax_element(out.local_beta2.begin(), out.local_beta2.end());
  const auto [lob, hib] = std::minmax_element(out.local_beta.begin(), out.local_beta.end());
  const bool banded = (*hi2 - *lo2) > 0.1 || (*hib - *lob) > 0.1;
  if (!banded) {
    out.beta_hat = out.beta_ls;
    out.beta2_hat = out.beta2_ls;
  } else {
    double b2min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zs.size(); ++i)
      if (zs[i] >= 10.0) b2min = std::min(b2min, lre[i] / lz[i]);
    out.beta_hat = *hib;
    out.beta2_hat = std::isfinite(b2min) ? b2min : out.beta2_ls;
    out.warning = "band-dependent growth: per-decade slopes of log Re psi range over [" +
                  detail::g17(*lo2) + ", " + detail::g17(*hi2) + "]";
  }
  return out;
}

struct Example33 {
  LevyDensity density;
  std::vector<double> z;  // z_1, ..., z_K (as far as representable)
  std::vector<double> growth;  // G_k = c^{(varsigma+1)/alpha1} z_k^{varsigma alpha2/alpha1}
  double c = 0.0;
  double c1 = 0.0;
  bool truncated = false;  // z_K would overflow
  std::vector<std::pair<double, double>> bands() const {  // [z_k, G_k) in z-space
    std::vector<std::pair<double, double>> b;
    for (std::size_t k = 0; k < growth.size(); ++k) b.emplace_back(z[k], growth[k]);
    return b;
  }
};

// Subordinator density: baseline 1/(c1 x^{1+alpha1}) on (0, 1], raised to
// kappa1 x^{-1-alpha2} on [1/(2 G_k), 1/z_k). z_{k+1} is the least power of 2
// above gap * G_k (gap = 1 reproduces the minimal growth rule).
inline Example33 make_example33(double alpha1, double alpha2, double c1, double kappa1, double varsigma, double z1,
                                std::size_t K, double gap = 1.0) {
  if (!(0.0 < alpha1 && alpha1 < alpha2 && alpha2 < 1.0)) throw PreconditionError("need 0 < alpha1 < alpha2 < 1");
  if (!(c1 > 1.0) || !(kappa1 > 0.0 && kappa1 <= c1) || !(varsigma > 1.0) || !(z1 > 1.0) || !(gap >= 1.0))
    throw PreconditionError("need c1 > 1, 0 < kappa1 <= c1, varsigma > 1, z1 > 1, gap >= 1");
  Example33 ex;
  ex.c1 = c1;
  ex.c = c1 * (2.0 / alpha2 + 1.0 / (1.0 - alpha2) + 8.0);
  const double lc = (varsigma + 1.0) / alpha1 * std::log(ex.c);
  const double p = varsigma * alpha2 / alpha1;
  double z = z1;
  for (std::size_t k = 0; k < K; ++k) {
    const double lg = lc + p * std::log(z);
    if (lg > 700.0) {
      ex.truncated = true;
      break;
    }
    ex.z.push_back(z);
    ex.growth.push_back(std::exp(lg));
    const double next = std::exp2(std::floor(std::log2(gap * std::exp(lg))) + 1.0);
    if (!std::isfinite(next)) {
      if (k + 1 < K) ex.truncated = true;
      break;
    }
    z = next;
  }
  // x-space bands, merged where they touch
  std::vector<std::pair<double, double>> xb;
  for (std::size_t k = 0; k < ex.z.size(); ++k) xb.emplace_back(0.5 / ex.growth[k], std::min(1.0, 1.0 / ex.z[k]));
  std::sort(xb.begin(), xb.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& b : xb) {
    if (!merged.empty() && b.first <= merged.back().second) merged.back().second = std::max(merged.back().second, b.second);
    else merged.push_back(b);
  }
  const PowerLaw base{1.0 / c1, alpha1};
  const PowerLaw boost{kappa1, alpha2};
  // kappa1 x^{-1-alpha2} >= baseline on (0, 1] iff kappa1 c1 >= 1
  const Formula band_formula = kappa1 * c1 >= 1.0 ? Formula{boost} : Formula{PowerSum{{base, boost}}};
  double lo = 0.0;
  for (const auto& [a, b] : merged) {
    if (a > lo) ex.density.pieces.push_back({lo, a, base});
    ex.density.pieces.push_back({a, b, band_formula});
    lo = b;
  }
  if (lo < 1.0) ex.density.pieces.push_back({lo, 1.0, base});
  ex.density.envelope = Envelope{c1, alpha1, alpha2};
  return ex;
}

// Two-sided density c [log(-log|x|)]^delta / x^2 on 0 < |x| < 1/e.
inline LevyDensity make_example35(double c, double delta) {
  if (!(c > 0.0) || !(delta > 0.0)) throw PreconditionError("need c > 0, delta > 0");
  LevyDensity d;
  d.pieces.push_back({0.0, std::exp(-1.0), LogLog{c, delta}});
  d.mirror = true;
  return d;
}

}  // namespace huntkit
