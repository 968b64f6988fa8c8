#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "huntkit/criteria.hpp"
#include "huntkit/decompose.hpp"
#include "huntkit/exponent.hpp"
#include "huntkit/json_io.hpp"
#include "huntkit/mc.hpp"
#include "huntkit/measures.hpp"
#include "huntkit/model.hpp"

using namespace huntkit;
using namespace huntkit::cli;

namespace {

struct Global {
  std::string out = "huntkit-out";
  bool json = false;
  std::uint64_t seed = 1;
  double tol = 1e-8;
};

struct CheckArgs {
  std::string kind;
  std::string model;
  std::string model2;
  std::string grid;
  std::string f = "log";
  double kappa = 0.0;
  std::string bands;
  std::size_t points = 50;
  double alpha1 = 0.0, alpha2 = 0.0, c = 0.0;
  double delta = 1.0;
};

struct EnergyArgs {
  std::string kind;
  std::string model;
  std::string measure;
  double R = 1e4;
  double lambda = 1.0;
  std::string scan;
  double delta = 1.0;
  double varsigma = 2.0;
  std::string list;
};

struct ExampleArgs {
  std::string which;
  double alpha1 = 0.3, alpha2 = 0.6, c1 = 2.0, kappa1 = 1.0, varsigma = 2.0, z1 = 2.0, gap = 1.0;
  std::size_t K = 4;
  double c = 1.0, delta = 1.0;
};

struct DecomposeArgs {
  std::string model;
  double varsigma = 2.0;
  int stages = -1;
  bool verify = false;
  std::size_t samples = 100;
};

struct SimulateArgs {
  std::string model;
  double time = 1.0;
  double tau = 1e-4;
  std::size_t n = 100000;
  std::string zs = "0.5,1,2";
  bool values = false;
};

LevyTriplet load_model(Run& run, const std::string& path) { return model_from_json(run.load_json(path)); }

Json cmd_validate(Run& run, const std::string& path, bool& failed) {
  const auto t = load_model(run, path);
  const auto rep = validate_triplet(t);
  failed = !rep.ok();
  Json j = {{"model", path}, {"ok", rep.ok()}, {"violations", rep.violations}};
  run.write("validate.json", j.dump(2) + "\n");
  return j;
}

Json cmd_exponent(Run& run, const Global& g, const std::string& path, const std::string& grid) {
  const auto t = load_model(run, path);
  const auto vs = eval_exponent_grid(t, parse_grid(grid).points(), g.tol);
  std::ostringstream csv;
  write_exponent_csv(csv, vs);
  run.write("exponent.csv", csv.str());
  std::string plot = "z,A,B\n";
  double min_a = kInf, max_err = 0.0;
  for (const auto& v : vs) {
    plot += detail::g17(v.z) + "," + detail::g17(v.A) + "," + detail::g17(v.B) + "\n";
    min_a = std::min(min_a, v.A);
    max_err = std::max(max_err, v.abs_err);
  }
  run.write("exponent_plot.csv", plot);
  Json j = {{"model", path}, {"grid", grid}, {"rows", vs.size()}, {"min_A", json_detail::num(min_a)}, {"max_abs_err", max_err}};
  run.write("exponent.json", j.dump(2) + "\n");
  return j;
}

std::function<double(double)> rao_f(const std::string& name) {
  if (name == "log") return [](double a) { return 1.0 + std::log(a); };
  if (name == "loglog") return [](double a) { return 1.0 + std::log(1.0 + std::log(a)); };
  if (name == "const") return [](double) { return 1.0; };
  throw UsageError("--f must be log, loglog or const");
}

std::vector<std::pair<double, double>> parse_bands(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  for (std::string b; std::getline(ss, b, ',');) {
    const auto colon = b.find(':');
    if (colon == std::string::npos) throw UsageError("bands must be lo:hi,lo:hi,...");
    const auto lo = parse_list(b.substr(0, colon)), hi = parse_list(b.substr(colon + 1));
    out.emplace_back(lo.at(0), hi.at(0));
  }
  return out;
}

Json cmd_check(Run& run, const Global& g, const CheckArgs& a) {
  const auto t = load_model(run, a.model);
  const bool liminf = a.kind == "liminf";
  const Grid grid = parse_grid(a.grid.empty() ? (liminf ? "16:1e8:log:200" : "1:1e6:log:400") : a.grid);
  Json j;
  std::vector<std::pair<double, double>> rows;
  auto take = [&](const CriterionReport& r) {
    j = report_to_json(r);
    rows = r.samples;
  };
  if (a.kind == "kanda-forst") {
    take(kanda_forst(t, grid.window(), g.tol));
  } else if (a.kind == "rao") {
    take(rao_check(t, rao_f(a.f), grid.window(), g.tol));
  } else if (a.kind == "cba") {
    take(cba_check(t, grid.window(), g.tol));
  } else if (a.kind == "perturbation") {
    if (a.model2.empty()) throw UsageError("perturbation needs --model2");
    take(perturbation_check(t, load_model(run, a.model2), grid.window(), g.tol));
  } else if (a.kind == "band") {
    if (a.bands.empty()) throw UsageError("band needs --bands lo:hi,...");
    take(band_ratio(t, a.kappa, parse_bands(a.bands), a.points, g.tol));
  } else if (a.kind == "envelope") {
    take(envelope_check(t, a.alpha1, a.alpha2, a.c, grid.window(), g.tol));
  } else if (a.kind == "liminf") {
    const auto r = liminf_loglog(t, a.delta, grid.points(), g.tol);
    j = report_to_json(r);
    rows = r.decade_infima;
  } else {
    j = report_to_json(bg_indexes(t, grid.window(), g.tol));
  }
  run.write("check.json", j.dump(2) + "\n");
  run.write("check.csv", samples_csv(rows, "z,ratio"));
  return j;
}

Json cmd_energy(Run& run, const Global& g, const EnergyArgs& a) {
  const auto t = load_model(run, a.model);
  if (a.measure.empty()) throw UsageError("energy needs --measure");
  const auto m = measure_from_json(run.load_json(a.measure));
  Json j = {{"functional", a.kind}, {"R", a.R}};
  EnergyOptions opt;
  opt.tol = g.tol;
  if (a.kind == "one-energy") {
    j["estimate"] = report_to_json(one_energy(m, t, a.R, opt));
  } else if (a.kind == "clambda" && !a.scan.empty()) {
    const auto colon = a.scan.find(':');
    if (colon == std::string::npos) throw UsageError("--scan must be k0:k1");
    const double k0d = parse_list(a.scan.substr(0, colon)).at(0), k1d = parse_list(a.scan.substr(colon + 1)).at(0);
    const int k0 = static_cast<int>(k0d), k1 = static_cast<int>(k1d);
    if (k0 != k0d || k1 != k1d || k1 < k0 || k1 - k0 > 200) throw UsageError("--scan needs integers k0 <= k1");
    const ExponentTable table(t, 2.0 * a.R, opt.per_decade, g.tol);
    opt.table = &table;
    std::vector<std::pair<double, double>> rows;
    Json scan = Json::array();
    for (int k = k0; k <= k1; ++k) {
      const double lambda = std::ldexp(1.0, k);
      const auto e = c_lambda(m, t, lambda, a.R, opt);
      rows.emplace_back(lambda, e.value_at_R);
      scan.push_back({{"lambda", lambda}, {"estimate", report_to_json(e)}});
    }
    run.write("clambda.csv", samples_csv(rows, "lambda,c_lambda"));
    j["scan"] = scan;
  } else if (a.kind == "clambda") {
    j["lambda"] = a.lambda;
    j["estimate"] = report_to_json(c_lambda(m, t, a.lambda, a.R, opt));
  } else if (a.kind == "cdelta") {
    j["delta"] = a.delta;
    j["estimate"] = report_to_json(condition_Cdelta(m, t, a.delta, a.R, opt));
  } else if (a.kind == "c0") {
    j["estimate"] = report_to_json(condition_C0(m, t, a.R, opt));
  } else {
    if (a.list.empty()) throw UsageError(a.kind + " needs --bands-at (comma-separated y_k or x_k)");
    BandOptions bopt;
    const auto pts = parse_list(a.list);
    j["varsigma"] = a.varsigma;
    j["bands"] = report_to_json(a.kind == "clog" ? condition_Clog_sum(m, t, a.varsigma, pts, a.R, bopt)
                                                 : condition_Cloglog_sum(m, t, a.varsigma, pts, a.R, bopt));
  }
  run.write("energy.json", j.dump(2) + "\n");
  return j;
}

Json cmd_example(Run& run, const ExampleArgs& a) {
  Json j = {{"example", a.which}};
  LevyTriplet t;
  t.form = ExponentForm::subordinator;
  if (a.which == "e33") {
    const auto ex = make_example33(a.alpha1, a.alpha2, a.c1, a.kappa1, a.varsigma, a.z1, a.K, a.gap);
    t.density = ex.density;
    run.write("bands.csv", samples_csv(ex.bands(), "z_lo,z_hi"));
    j["c"] = ex.c;
    j["c1"] = ex.c1;
    j["z"] = ex.z;
    j["growth"] = ex.growth;
    j["truncated"] = ex.truncated;
  } else {
    t.form = ExponentForm::levy_khintchine;
    t.density = make_example35(a.c, a.delta);
  }
  run.write("model.json", model_to_json(t).dump(2) + "\n");
  run.write("example.json", j.dump(2) + "\n");
  return j;
}

// max |rho1 + rho2 - rho| / rho over 10^4 log-spaced x in [1e-150, 1]
double reconstruction_error(const LevyDensity& rho, const DecompositionPlan& plan) {
  double worst = 0.0;
  for (double x : log_grid(1e-150, 1.0, 10000)) {
    const double r = density_at(rho, x);
    if (!std::isfinite(r) || r <= 0.0) continue;
    worst = std::max(worst, std::abs(density_at(plan.rho1, x) + density_at(plan.rho2, x) - r) / r);
  }
  return worst;
}

Json cmd_decompose(Run& run, const Global& g, const DecomposeArgs& a) {
  const auto t = load_model(run, a.model);
  const auto plan = build_plan(t.density, a.varsigma, a.stages >= 0 ? std::optional<int>(a.stages) : std::nullopt);
  run.write("plan.json", export_plan(plan));
  const double err = reconstruction_error(t.density, plan);
  Json j = {{"stages", plan.stages.size() - 1},
            {"truncated", plan.truncated},
            {"reconstruction_max_rel", err},
            {"reconstruction_ok", err <= 1e-12}};
  if (a.verify) {
    Json checks = Json::array();
    for (const auto& s : plan.stages)
      if (s.n >= 1) checks.push_back(report_to_json(verify_band_ratio(plan, s.receiver == 1 ? 2 : 1, s.n, a.samples, g.tol)));
    j["band_ratio"] = checks;
  }
  run.write("decompose.json", j.dump(2) + "\n");
  return j;
}

Json cmd_simulate(Run& run, const Global& g, const SimulateArgs& a) {
  const auto t = load_model(run, a.model);
  const auto batch = sample_paths(t, a.time, a.tau, a.n, g.seed);
  const auto rows = ecf_test(batch, t, parse_list(a.zs), std::min(g.tol, 1e-10));
  std::ostringstream csv;
  write_ecf_csv(csv, rows);
  run.write("ecf.csv", csv.str());
  if (a.values) {
    std::string s = "value\n";
    for (double v : batch.values) s += detail::g17(v) + "\n";
    run.write("samples.csv", s);
  }
  double mean = 0.0;
  for (double v : batch.values) mean += v;
  if (!batch.values.empty()) mean /= static_cast<double>(batch.values.size());
  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && (r.pass || r.excluded);
  Json j = {{"n", a.n},        {"time", a.time},   {"tau", a.tau},
            {"seed", g.seed},  {"rng", batch.rng}, {"lambda", batch.lambda},
            {"bias_bound", batch.bias_bound}, {"mean", mean}, {"all_pass", all_pass}};
  run.write("simulate.json", j.dump(2) + "\n");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"huntkit: Lévy exponent evaluation, potential-theory criteria and subordinator decomposition"};
  app.set_version_flag("--version", HUNTKIT_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_flag("--json", g.json, "print the JSON report to stdout");
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", g.tol, "exponent tolerance")->capture_default_str()->check(CLI::PositiveNumber);

  std::string path, grid = "1:1e4:log:100";
  auto* validate = app.add_subcommand("validate", "check a model file");
  validate->add_option("model", path, "model JSON")->required();

  auto* exponent = app.add_subcommand("exponent", "evaluate psi, A, B on a grid");
  exponent->add_option("model", path, "model JSON")->required();
  exponent->add_option("--z", grid, "grid lo:hi:log|lin:count")->capture_default_str();

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "measure-free criterion checks");
  check->add_option("kind", ca.kind)->required()->check(
      CLI::IsMember({"kanda-forst", "rao", "cba", "envelope", "band", "liminf", "perturbation", "indexes"}));
  check->add_option("model", ca.model, "model JSON")->required();
  check->add_option("--model2", ca.model2, "second model (perturbation: psi_2)");
  check->add_option("--z", ca.grid, "window lo:hi:log:count");
  check->add_option("--f", ca.f, "rao growth function: log|loglog|const")->capture_default_str();
  check->add_option("--kappa", ca.kappa, "band constant");
  check->add_option("--bands", ca.bands, "z bands lo:hi,lo:hi,...");
  check->add_option("--points", ca.points, "samples per band")->capture_default_str();
  check->add_option("--alpha1", ca.alpha1);
  check->add_option("--alpha2", ca.alpha2);
  check->add_option("--c", ca.c);
  check->add_option("--delta", ca.delta)->capture_default_str();

  EnergyArgs ea;
  auto* energy = app.add_subcommand("energy", "energy functionals of a finite measure");
  energy->add_option("kind", ea.kind)->required()->check(
      CLI::IsMember({"one-energy", "clambda", "cdelta", "c0", "clog", "cloglog"}));
  energy->add_option("model", ea.model, "model JSON")->required();
  energy->add_option("--measure", ea.measure, "measure JSON")->required();
  energy->add_option("--R", ea.R, "truncation radius")->capture_default_str();
  energy->add_option("--lambda", ea.lambda)->capture_default_str();
  energy->add_option("--scan", ea.scan, "lambda = 2^k for k0:k1");
  energy->add_option("--delta", ea.delta)->capture_default_str();
  energy->add_option("--varsigma", ea.varsigma)->capture_default_str();
  energy->add_option("--bands-at", ea.list, "y_k (clog) or x_k (cloglog), comma-separated");

  ExampleArgs xa;
  auto* example = app.add_subcommand("example", "write a worked-example model");
  example->add_option("which", xa.which)->required()->check(CLI::IsMember({"e33", "e35"}));
  example->add_option("--alpha1", xa.alpha1)->capture_default_str();
  example->add_option("--alpha2", xa.alpha2)->capture_default_str();
  example->add_option("--c1", xa.c1)->capture_default_str();
  example->add_option("--kappa1", xa.kappa1)->capture_default_str();
  example->add_option("--varsigma", xa.varsigma)->capture_default_str();
  example->add_option("--z1", xa.z1)->capture_default_str();
  example->add_option("--K", xa.K)->capture_default_str();
  example->add_option("--gap", xa.gap)->capture_default_str();
  example->add_option("--c", xa.c, "e35 constant")->capture_default_str();
  example->add_option("--delta", xa.delta, "e35 exponent")->capture_default_str();

  DecomposeArgs da;
  auto* decompose = app.add_subcommand("decompose", "split a subordinator density into two components");
  decompose->add_option("model", da.model, "model JSON with envelope")->required();
  decompose->add_option("--varsigma", da.varsigma)->capture_default_str();
  decompose->add_option("--stages", da.stages, "stage count (default: until 1e300)");
  decompose->add_flag("--verify", da.verify, "measure B/A on each construction band");
  decompose->add_option("--samples", da.samples)->capture_default_str();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "compound-Poisson paths and an empirical CF test");
  simulate->add_option("model", sa.model, "subordinator-form model JSON")->required();
  simulate->add_option("--time", sa.time)->capture_default_str();
  simulate->add_option("--tau", sa.tau)->capture_default_str();
  simulate->add_option("--n", sa.n)->capture_default_str();
  simulate->add_option("--zs", sa.zs, "comma-separated z")->capture_default_str();
  simulate->add_flag("--values", sa.values, "also write samples.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  Run run(g.out, args, g.seed);
  int code = kExitOk;
  try {
    Json report;
    if (validate->parsed()) {
      bool failed = false;
      report = cmd_validate(run, path, failed);
      if (failed) code = kExitValidation;
    } else if (exponent->parsed()) {
      report = cmd_exponent(run, g, path, grid);
    } else if (check->parsed()) {
      report = cmd_check(run, g, ca);
    } else if (energy->parsed()) {
      report = cmd_energy(run, g, ea);
    } else if (example->parsed()) {
      report = cmd_example(run, xa);
    } else if (decompose->parsed()) {
      report = cmd_decompose(run, g, da);
    } else if (simulate->parsed()) {
      report = cmd_simulate(run, g, sa);
    }
    run.finish();
    if (g.json) std::cout << report.dump(2) << '\n';
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return code;
}
