#pragma once

// JSON for models, measures, decomposition plans and reports. Field names
// are fixed; tabulated pieces have no JSON form. An infinite piece bound is
// written as null.

#include <cmath>
#include <string>

#include "huntkit/criteria.hpp"
#include "huntkit/decompose.hpp"
#include "huntkit/errors.hpp"
#include "huntkit/measures.hpp"
#include "huntkit/mc.hpp"
#include "huntkit/model.hpp"
#include "json.hpp"

namespace huntkit {

using Json = nlohmann::ordered_json;

namespace json_detail {

inline double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw StructuralError(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

inline Json bound(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline double read_bound(const Json& j, const char* key) {
  if (j.contains(key) && j.at(key).is_null()) return kInf;
  return number(j, key);
}

// NaN and infinities become null
inline Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json power_json(const PowerLaw& t) { return Json{{"kappa", t.kappa}, {"alpha", t.alpha}}; }

}  // namespace json_detail

inline Json formula_params(const Formula& f) {
  using namespace json_detail;
  return std::visit(detail::overloaded{
                        [](const PowerLaw& t) { return power_json(t); },
                        [](const PowerSum& s) {
                          Json terms = Json::array();
                          for (const auto& t : s.terms) terms.push_back(power_json(t));
                          return Json{{"terms", terms}};
                        },
                        [](const LogLog& l) { return Json{{"c", l.c}, {"delta", l.delta}}; },
                        [](const Tabulated&) -> Json {
                          throw PreconditionError("tabulated pieces cannot be serialized");
                        }},
                    f);
}

inline Json density_to_json(const LevyDensity& d) {
  Json pieces = Json::array();
  for (const auto& p : d.pieces)
    pieces.push_back({{"lo", p.lo}, {"hi", json_detail::bound(p.hi)}, {"kind", formula_kind(p.formula)},
                      {"params", formula_params(p.formula)}});
  Json env = nullptr;
  if (d.envelope) env = {{"c", d.envelope->c}, {"alpha1", d.envelope->alpha1}, {"alpha2", d.envelope->alpha2}};
  return {{"pieces", pieces}, {"envelope", env}};
}

inline Formula formula_from_json(const std::string& kind, const Json& params) {
  using json_detail::number;
  auto power = [](const Json& j) { return PowerLaw{number(j, "kappa"), number(j, "alpha")}; };
  if (kind == "power") return power(params);
  if (kind == "powersum") {
    if (!params.contains("terms") || !params.at("terms").is_array()) throw StructuralError("powersum needs 'terms'");
    PowerSum s;
    for (const auto& t : params.at("terms")) s.terms.push_back(power(t));
    return s;
  }
  if (kind == "loglog") return LogLog{number(params, "c"), number(params, "delta")};
  throw StructuralError("unknown piece kind '" + kind + "'");
}

// `mirror` is a model-level field and is set by the caller.
inline LevyDensity density_from_json(const Json& j) {
  LevyDensity d;
  if (!j.contains("pieces") || !j.at("pieces").is_array()) throw StructuralError("density needs a 'pieces' array");
  for (const auto& p : j.at("pieces")) {
    if (!p.contains("kind") || !p.at("kind").is_string()) throw StructuralError("piece needs a 'kind' string");
    d.pieces.push_back({json_detail::number(p, "lo"), json_detail::read_bound(p, "hi"),
                        formula_from_json(p.at("kind").get<std::string>(), p.value("params", Json::object()))});
  }
  if (j.contains("envelope") && !j.at("envelope").is_null()) {
    const auto& e = j.at("envelope");
    d.envelope = Envelope{json_detail::number(e, "c"), json_detail::number(e, "alpha1"), json_detail::number(e, "alpha2")};
  }
  return d;
}

inline const char* form_name(ExponentForm f) {
  return f == ExponentForm::subordinator ? "subordinator" : "levy_khintchine";
}

inline Json model_to_json(const LevyTriplet& t) {
  return {{"drift", t.drift},
          {"gaussian", t.gaussian},
          {"density", density_to_json(t.density)},
          {"mirror", t.density.mirror},
          {"form", form_name(t.form)}};
}

// "form" is optional and defaults to Lévy–Khintchine.
inline LevyTriplet model_from_json(const Json& j) {
  if (!j.is_object()) throw StructuralError("model must be a JSON object");
  LevyTriplet t;
  t.drift = json_detail::number(j, "drift");
  t.gaussian = json_detail::number(j, "gaussian");
  if (!j.contains("density")) throw StructuralError("model needs a 'density'");
  t.density = density_from_json(j.at("density"));
  t.density.mirror = j.value("mirror", false);
  const std::string form = j.value("form", std::string("levy_khintchine"));
  if (form == "subordinator") t.form = ExponentForm::subordinator;
  else if (form != "levy_khintchine") throw StructuralError("unknown form '" + form + "'");
  check_structure(t.density);
  return t;
}

inline Json measure_to_json(const FiniteMeasure& m) {
  return std::visit(detail::overloaded{
                        [](const AtomsMeasure& a) {
                          Json atoms = Json::array();
                          for (const auto& x : a.atoms) atoms.push_back({{"location", x.location}, {"weight", x.weight}});
                          return Json{{"kind", "atoms"}, {"atoms", atoms}};
                        },
                        [](const GaussianMeasure& g) {
                          return Json{{"kind", "gaussian"}, {"mean", g.mean}, {"sd", g.sd}, {"mass", g.mass}};
                        },
                        [](const UniformMeasure& u) {
                          return Json{{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}, {"mass", u.mass}};
                        }},
                    m.kind);
}

inline FiniteMeasure measure_from_json(const Json& j) {
  using json_detail::number;
  const std::string kind = j.value("kind", std::string());
  FiniteMeasure m;
  if (kind == "atoms") {
    AtomsMeasure a;
    if (!j.contains("atoms") || !j.at("atoms").is_array()) throw StructuralError("atoms measure needs 'atoms'");
    for (const auto& x : j.at("atoms")) a.atoms.push_back({number(x, "location"), number(x, "weight")});
    m.kind = a;
  } else if (kind == "gaussian") {
    m.kind = GaussianMeasure{number(j, "mean"), number(j, "sd"), number(j, "mass")};
  } else if (kind == "uniform") {
    m.kind = UniformMeasure{number(j, "lo"), number(j, "hi"), number(j, "mass")};
  } else {
    throw StructuralError("unknown measure kind '" + kind + "'");
  }
  check_measure(m);
  return m;
}

inline Json plan_to_json(const DecompositionPlan& plan) {
  const auto& p = plan.params;
  Json stages = Json::array();
  for (const auto& s : plan.stages)
    stages.push_back({{"n", s.n},
                      {"epsilon", s.epsilon},
                      {"epsilon_next", s.epsilon_next},
                      {"z", s.z},
                      {"zprime", s.zprime},
                      {"variation", s.variation},
                      {"parity", s.parity()},
                      {"receiver", s.receiver == 1 ? "rho1" : "rho2"}});
  return {{"params", {{"c", p.c}, {"alpha1", p.alpha1}, {"alpha2", p.alpha2}, {"varsigma", p.varsigma}, {"c1", p.c1}}},
          {"stages", stages},
          {"rho1", density_to_json(plan.rho1)},
          {"rho2", density_to_json(plan.rho2)},
          {"truncated", plan.truncated},
          {"notes", plan.notes}};
}

inline DecompositionPlan plan_from_json(const Json& j) {
  using json_detail::number;
  DecompositionPlan plan;
  const auto& p = j.at("params");
  plan.params = {number(p, "c"), number(p, "alpha1"), number(p, "alpha2"), number(p, "varsigma"), number(p, "c1")};
  for (const auto& s : j.at("stages")) {
    PlanStage st;
    st.n = s.at("n").get<int>();
    st.epsilon = number(s, "epsilon");
    st.epsilon_next = number(s, "epsilon_next");
    st.z = number(s, "z");
    st.zprime = number(s, "zprime");
    st.variation = number(s, "variation");
    st.receiver = s.at("receiver").get<std::string>() == "rho1" ? 1 : 2;
    plan.stages.push_back(st);
  }
  plan.rho1 = density_from_json(j.at("rho1"));
  plan.rho2 = density_from_json(j.at("rho2"));
  plan.truncated = j.value("truncated", false);
  plan.notes = j.value("notes", std::vector<std::string>{});
  return plan;
}

inline std::string export_plan(const DecompositionPlan& plan) { return plan_to_json(plan).dump(2) + "\n"; }
inline DecompositionPlan import_plan(const std::string& text) { return plan_from_json(Json::parse(text)); }

// ---------------------------------------------------------------------------
// reports

inline std::string grid_spec(const Window& w) {
  return detail::g17(w.z_lo) + ":" + detail::g17(w.z_hi) + ":log:" + std::to_string(w.n);
}

inline Json report_to_json(const CriterionReport& r) {
  using json_detail::num;
  Json diag = Json::array();
  for (double d : r.diagnostics) diag.push_back(num(d));
  return {{"criterion", r.criterion},
          {"window", {{"z_lo", r.window.z_lo}, {"z_hi", r.window.z_hi}, {"n", r.window.n}}},
          {"grid", grid_spec(r.window)},
          {"verdict", r.verdict},
          {"constant", num(r.constant)},
          {"witness_z", num(r.witness_z)},
          {"excluded_points", r.excluded_points},
          {"notes", r.notes},
          {"diagnostics", diag}};
}

inline Json report_to_json(const LiminfReport& r) {
  Json dec = Json::array();
  for (const auto& [d, v] : r.decade_infima) dec.push_back({{"decade", d}, {"infimum", json_detail::num(v)}});
  return {{"criterion", "liminf_loglog"}, {"delta", r.delta}, {"decade_infima", dec}, {"verdict", r.verdict}, {"notes", r.notes}};
}

inline Json report_to_json(const BGIndexes& r) {
  return {{"criterion", "indexes"},     {"beta_hat", r.beta_hat},         {"beta2_hat", r.beta2_hat},
          {"beta_ls", r.beta_ls},       {"beta2_ls", r.beta2_ls},         {"beta_stderr", r.beta_stderr},
          {"beta2_stderr", r.beta2_stderr}, {"local_beta", r.local_beta}, {"local_beta2", r.local_beta2},
          {"warning", r.warning}};
}

inline Json report_to_json(const EnergyEstimate& e) {
  return {{"value_at_R", json_detail::num(e.value_at_R)},
          {"R", e.R},
          {"value_at_2R", json_detail::num(e.value_at_2R)},
          {"tail_bound", e.tail_bound ? json_detail::num(*e.tail_bound) : Json(nullptr)},
          {"converged", e.converged}};
}

inline Json report_to_json(const BandSum& s) {
  Json bands = Json::array();
  for (const auto& b : s.bands) {
    Json iv = Json::array();
    for (const auto& [lo, hi] : b.z_intervals) iv.push_back({lo, hi});
    bands.push_back({{"index", b.index},
                     {"y_lo", json_detail::num(b.y_lo)},
                     {"y_hi", json_detail::num(b.y_hi)},
                     {"value", json_detail::num(b.value)},
                     {"abs_err", json_detail::num(b.abs_err)},
                     {"z_intervals", iv},
                     {"status", b.status}});
  }
  return {{"total", json_detail::num(s.total)}, {"R", s.R}, {"bands", bands}, {"harmonic_partial_sums", s.harmonic_partial_sums}};
}

inline Json report_to_json(const BandRatioReport& r) {
  return {{"component", r.component},         {"n", r.n},
          {"z_lo", r.z_lo},                   {"z_hi", r.z_hi},
          {"samples", r.samples},             {"sup_ratio", r.sup_ratio},
          {"witness_z", r.witness_z},         {"c_upper", r.c_upper},
          {"bounded", r.bounded},             {"min_lower_ratio", r.min_lower_ratio},
          {"lower_bound_holds", r.lower_bound_holds}};
}

}  // namespace huntkit
