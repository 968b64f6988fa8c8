#pragma once

// Splitting a pure-jump subordinator density rho = rho1 + rho2 along a
// shrinking sequence eps_0 = 1 > eps_1 = 1/2 > eps_2 > ... Each component
// keeps half the lower envelope everywhere and receives the excess
// rho - 1/(c x^{1+alpha1}) on alternating intervals (eps_{n+1}, eps_n].

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "huntkit/criteria.hpp"
#include "huntkit/detail/parallel.hpp"
#include "huntkit/errors.hpp"
#include "huntkit/exponent.hpp"
#include "huntkit/model.hpp"

namespace huntkit {

struct PlanParams {
  double c = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double varsigma = 0.0;
  double c1 = 0.0;  // c (2/alpha2 + 1/(1-alpha2) + 1/2)
};

// Stage n assigns the excess on (epsilon_next, epsilon] to `receiver`.
// Stage 0 is the initialization and has no thresholds (z = zprime = 0).
struct PlanStage {
  int n = 0;
  double epsilon = 1.0;       // eps_n
  double epsilon_next = 0.5;  // eps_{n+1}
  double z = 0.0;             // z_{n+1}
  double zprime = 0.0;        // z'_{n+1}
  double variation = 0.0;     // certified V_n behind z_{n+1}
  int receiver = 1;           // 1 or 2
  std::string parity() const { return n % 2 == 0 ? "even" : "odd"; }
};

struct DecompositionPlan {
  PlanParams params;
  std::vector<PlanStage> stages;
  LevyDensity rho1;
  LevyDensity rho2;
  bool truncated = false;  // requested stages ran past floating range
  std::vector<std::string> notes;
};

namespace decompose_detail {

inline double c1_of(double c, double alpha2) { return c * (2.0 / alpha2 + 1.0 / (1.0 - alpha2) + 0.5); }

// log z'_{n+1} = [log(16c) + varsigma (log c1 + alpha2 log z_{n+1})] / alpha1
inline double log_zprime(const PlanParams& p, double z) {
  return (std::log(16.0 * p.c) + p.varsigma * (std::log(p.c1) + p.alpha2 * std::log(z))) / p.alpha1;
}

// Bound on |g(l+)| + |g(u)| + TV(g, (l, u]) for one piece.
inline double piece_variation(const Piece& piece) {
  const double l = piece.lo, u = piece.hi;
  if (!(l > 0.0) || !std::isfinite(u)) throw PreconditionError("variation bound needs a piece inside (0, inf) away from 0");
  if (auto terms = power_terms(piece.formula)) {
    double v = 0.0;
    for (const auto& t : *terms) {
      const double gl = std::abs(t.kappa) * std::pow(l, -1.0 - t.alpha);
      const double gu = std::abs(t.kappa) * std::pow(u, -1.0 - t.alpha);
      v += gl + gu + std::abs(gl - gu);
    }
    return v;
  }
  if (!is_monotone_decreasing(piece.formula))
    throw StructuralError("cannot certify a sine threshold for a non-monotone tabulated piece");
  const double gl = std::abs(formula_at(piece.formula, l));
  const double gu = std::abs(formula_at(piece.formula, u));
  return gl + gu + std::abs(gl - gu);
}

}  // namespace decompose_detail

// V with |∫ sin(zx) mu(dx)| <= V/|z| for all z, by one integration by parts
// per piece.
inline double variation_bound(const LevyDensity& mu) {
  double v = 0.0;
  for (const auto& p : mu.pieces) v += decompose_detail::piece_variation(p);
  return v;
}

// Smallest certified z_{n+1}: max(floor (1 + 1e-6), 2 V), so that
// V/|z| <= 1/2 <= 1 for all |z| >= z_{n+1}.
inline double find_z_threshold(const LevyDensity& mu, double floor) {
  if (!(floor > 0.0) || !std::isfinite(floor)) throw PreconditionError("floor must be positive and finite");
  for (const auto& p : mu.pieces)
    if (!(p.lo > 0.0)) throw PreconditionError("mu must be supported away from 0");
  return std::max(floor * (1.0 + 1e-6), 2.0 * variation_bound(mu));
}

namespace decompose_detail {

inline PowerLaw baseline(double c, double alpha1, double share) { return {share / c, alpha1}; }

// Pieces of rho - share/(c x^{1+alpha1}) on (lo, hi].
inline std::vector<Piece> excess_pieces(const LevyDensity& rho, const PlanParams& p, double share, double lo,
                                        double hi) {
  std::vector<Piece> out;
  const PowerLaw b = baseline(p.c, p.alpha1, share);
  for (const auto& piece : restrict_to(rho, lo, hi).pieces) {
    if (auto terms = power_terms(piece.formula)) {
      terms->push_back({-b.kappa, b.alpha});
      out.push_back({piece.lo, piece.hi, PowerSum{*terms}});
    } else {
      Formula f = piece.formula;
      out.push_back({piece.lo, piece.hi, Tabulated{[f, b](double x) { return formula_at(f, x) - formula_at(b, x); }, false}});
    }
  }
  return out;
}

// Certified V for the excess of rho on (lo, hi]; non-power pieces use the
// triangle inequality on rho and the baseline separately.
inline double excess_variation(const LevyDensity& rho, const PlanParams& p, double lo, double hi) {
  double v = 0.0;
  for (const auto& piece : excess_pieces(rho, p, 1.0, lo, hi)) {
    if (!std::holds_alternative<Tabulated>(piece.formula)) {
      v += piece_variation(piece);
      continue;
    }
    for (const auto& orig : restrict_to(rho, piece.lo, piece.hi).pieces) v += piece_variation(orig);
    v += piece_variation({piece.lo, piece.hi, baseline(p.c, p.alpha1, 1.0)});
  }
  return v;
}

// Component i: rho - b/2 where it receives, b/2 elsewhere on (0, 1].
inline LevyDensity assemble(const LevyDensity& rho, const PlanParams& p, const std::vector<PlanStage>& stages,
                            int component) {
  LevyDensity out;
  out.envelope = Envelope{2.0 * p.c, p.alpha1, p.alpha2};
  const Formula half = baseline(p.c, p.alpha1, 0.5);
  // the unfinished interval (0, eps_{N+1}] goes to the next receiver
  const int next = stages.back().receiver == 1 ? 2 : 1;
  const double floor_eps = stages.back().epsilon_next;
  if (floor_eps > 0.0 && next == component) {
    for (auto& piece : excess_pieces(rho, p, 0.5, 0.0, floor_eps)) out.pieces.push_back(piece);
  } else if (floor_eps > 0.0) {
    out.pieces.push_back({0.0, floor_eps, half});
  }
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    if (it->receiver == component) {
      for (auto& piece : excess_pieces(rho, p, 0.5, it->epsilon_next, it->epsilon)) out.pieces.push_back(piece);
    } else {
      out.pieces.push_back({it->epsilon_next, it->epsilon, half});
    }
  }
  return out;
}

}  // namespace decompose_detail

// Excess measure mu^{(n)} of the component that does not receive at stage n,
// restricted to (eps_n, 1].
inline LevyDensity stage_measure(const LevyDensity& rho, const PlanParams& p, const std::vector<PlanStage>& stages,
                                 int n) {
  LevyDensity mu;
  if (n <= 0 || static_cast<std::size_t>(n) > stages.size()) throw PreconditionError("stage index out of range");
  const int other = stages[static_cast<std::size_t>(n - 1)].receiver;  // receiver alternates
  for (int k = n - 1; k >= 0; --k) {
    const auto& s = stages[static_cast<std::size_t>(k)];
    if (s.receiver != other) continue;
    for (auto& piece : decompose_detail::excess_pieces(rho, p, 1.0, s.epsilon_next, s.epsilon))
      mu.pieces.push_back(piece);
  }
  return mu;
}
// Runs the induction for `stages` steps after initialization, or while
// z'_{n+1} < 1e300 when unset. An eps_{n+1} below double range is stored
// as 0 and its interval then reaches down to 0.
inline DecompositionPlan build_plan(const LevyDensity& rho, double varsigma,
                                    std::optional<int> stages = std::nullopt) {
  if (!rho.envelope) throw PreconditionError("decomposition needs a declared envelope (c, alpha1, alpha2)");
  if (rho.mirror) throw PreconditionError("decomposition applies to one-sided subordinator densities");
  const auto& e = *rho.envelope;
  if (!(0.0 < e.alpha1 && e.alpha1 < e.alpha2 && e.alpha2 < 1.0)) throw PreconditionError("need 0 < alpha1 < alpha2 < 1");
  if (!(e.c > 1.0)) throw PreconditionError("need c > 1");
  if (!(varsigma > 1.0)) throw PreconditionError("need varsigma > 1");
  if (stages && *stages < 0) throw PreconditionError("stage count must be >= 0");
  for (const auto& p : rho.pieces)
    if (p.hi > 1.0) throw PreconditionError("rho must vanish off (0, 1]");
  const auto rep = validate_triplet({0.0, 0.0, rho, ExponentForm::subordinator});
  if (!rep.ok()) throw PreconditionError("rho fails validation: " + rep.violations.front());

  DecompositionPlan plan;
  auto& p = plan.params;
  p = {e.c, e.alpha1, e.alpha2, varsigma, decompose_detail::c1_of(e.c, e.alpha2)};
  plan.stages.push_back({0, 1.0, 0.5, 0.0, 0.0, 0.0, 1});
  const double log_max = std::log(1e300);
  for (int n = 1; !stages || n <= *stages; ++n) {
    const auto& prev = plan.stages.back();
    if (prev.epsilon_next == 0.0) {  // 1/eps_n floor is infinite
      plan.truncated = stages.has_value();
      break;
    }
    const int other = prev.receiver;
    double v = 0.0;
    for (const auto& s : plan.stages)
      if (s.receiver == other) v += decompose_detail::excess_variation(rho, p, s.epsilon_next, s.epsilon);
    PlanStage st;
    st.n = n;
    st.epsilon = prev.epsilon_next;
    st.variation = v;
    st.receiver = other == 1 ? 2 : 1;
    st.z = std::max(1.0 / st.epsilon * (1.0 + 1e-6), 2.0 * v);
    const double lzp = decompose_detail::log_zprime(p, st.z);
    const double leps = -lzp / (1.0 - p.alpha2);
    if (!std::isfinite(st.z) || lzp >= log_max) {
      plan.truncated = stages.has_value();
      break;
    }
    st.zprime = std::exp(lzp);
    st.epsilon_next = std::exp(leps);
    if (st.epsilon_next < std::numeric_limits<double>::min()) {
      st.epsilon_next = 0.0;
      plan.notes.push_back("eps_" + std::to_string(n + 1) + " = exp(" + detail::g17(leps) +
                           ") is below double range; stored as 0");
    }
    if (!(st.epsilon_next < st.epsilon) || !(st.z < st.zprime)) throw StructuralError("stage ordering failed");
    plan.stages.push_back(st);
  }
  plan.rho1 = decompose_detail::assemble(rho, p, plan.stages, 1);
  plan.rho2 = decompose_detail::assemble(rho, p, plan.stages, 2);
  return plan;
}

struct BandRatioReport {
  int component = 1;
  int n = 0;
  double z_lo = 0.0;  // z_{n+1}
  double z_hi = 0.0;  // z'_{n+1}
  std::size_t samples = 0;
  double sup_ratio = 0.0;  // sup B/A on the band
  double witness_z = 0.0;
  double c_upper = 0.0;  // 2 + c/(1-alpha2) + 8/(1-alpha1) + 8/alpha1
  bool bounded = false;  // sup_ratio <= c_upper
  double min_lower_ratio = 0.0;  // min of A / (|z|^alpha1 / (16 c))
  bool lower_bound_holds = false;
};

inline double band_constant(const PlanParams& p) {
  return 2.0 + p.c / (1.0 - p.alpha2) + 8.0 / (1.0 - p.alpha1) + 8.0 / p.alpha1;
}

// B/A for component X^i over [z_{n+1}, z'_{n+1}]; X^i must be the
// component that does not receive at stage n.
inline BandRatioReport verify_band_ratio(const DecompositionPlan& plan, int component, int n,
                                         std::size_t samples = 100, double tol = 1e-8) {
  if (component != 1 && component != 2) throw PreconditionError("component must be 1 or 2");
  if (n < 1 || static_cast<std::size_t>(n) >= plan.stages.size()) throw PreconditionError("stage index out of range");
  const auto& st = plan.stages[static_cast<std::size_t>(n)];
  if (st.receiver == component) throw PreconditionError("stage parity does not match the component");
  const LevyTriplet t{0.0, 0.0, component == 1 ? plan.rho1 : plan.rho2, ExponentForm::subordinator};
  BandRatioReport rep;
  rep.component = component;
  rep.n = n;
  rep.z_lo = st.z;
  rep.z_hi = st.zprime;
  rep.samples = samples;
  rep.c_upper = band_constant(plan.params);
  const auto zs = log_grid(st.z, st.zprime, samples);
  const auto vs = detail::parallel_map<ExponentValue>(zs.size(), [&](std::size_t i) { return eval_exponent(t, zs[i], tol); });
  rep.min_lower_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double r = vs[i].B / vs[i].A;
    if (r > rep.sup_ratio) {
      rep.sup_ratio = r;
      rep.witness_z = zs[i];
    }
    const double lower = std::pow(zs[i], plan.params.alpha1) / (16.0 * plan.params.c);
    rep.min_lower_ratio = std::min(rep.min_lower_ratio, vs[i].A / lower);
  }
  rep.bounded = rep.sup_ratio <= rep.c_upper;
  rep.lower_bound_holds = rep.min_lower_ratio >= 1.0;
  return rep;
}

}  // namespace huntkit
