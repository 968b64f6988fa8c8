#include "catch_amalgamated.hpp"

#include <cmath>

#include "fixtures.hpp"
#include "huntkit/criteria.hpp"

using namespace huntkit;
using Catch::Approx;

namespace {

LevyTriplet symmetric_stable(double alpha) {
  auto d = fx::power_density(alpha);
  d.mirror = true;
  return fx::jumps_only(d);
}

LevyTriplet drift(double a) {
  LevyTriplet t;
  t.drift = a;
  return t;
}

LevyTriplet example33_triplet(const Example33& ex) { return fx::jumps_only(ex.density, ExponentForm::subordinator); }

}  // namespace

TEST_CASE("Kanda–Forst constant", "[criteria]") {
  const auto sym = kanda_forst(symmetric_stable(0.7), {1.0, 1e6, 100});
  CHECK(sym.constant <= 1e-7);
  CHECK(sym.verdict == std::string(verdict::holds));
  const auto d1 = kanda_forst(drift(1.0), {1.0, 1e3, 100});
  const auto d2 = kanda_forst(drift(1.0), {1.0, 1e6, 100});
  CHECK(d2.verdict == std::string(verdict::unbounded));
  CHECK(d1.constant == Approx(1e3));
  CHECK(d2.constant == Approx(1e6));
}

TEST_CASE("Rao check", "[criteria]") {
  auto t = fx::jumps_only(fx::power_density(0.5), ExponentForm::subordinator);
  t.drift = 1.0;
  const Window w{1.0, 1e4, 120};
  const auto kf = kanda_forst(t, w);
  const auto r1 = rao_check(t, [](double) { return 1.0; }, w);
  CHECK(r1.constant == kf.constant);
  const auto rl = rao_check(t, [](double a) { return 1.0 + std::log(a); }, w);
  CHECK(rl.constant < r1.constant);
  CHECK(rl.diagnostics.size() == 10);
  CHECK(rl.diagnostics.back() > rl.diagnostics.front());
  CHECK(rao_check(symmetric_stable(0.5), [](double) { return 1.0; }, w).constant <= 1e-7);
  CHECK_THROWS_AS(rao_check(t, [](double a) { return 2.0 + std::sin(a); }, w), PreconditionError);
}

TEST_CASE("C^{B/A} check", "[criteria]") {
  const auto b = cba_check(fx::brownian(), {3.0, 1e6, 200});
  CHECK(b.constant < 1.0);
  CHECK(b.verdict == std::string(verdict::holds));
  CHECK(cba_check(drift(1.0), {3.0, 1e6, 200}).verdict == std::string(verdict::unbounded));

  LevyTriplet ex35 = fx::jumps_only(make_example35(1.0, 1.0));
  ex35.drift = 1.0;
  const auto small = cba_check(ex35, {16.0, 1e4, 60});
  const auto large = cba_check(ex35, {16.0, 1e7, 120});
  CHECK(std::isfinite(small.constant));
  CHECK(large.verdict == std::string(verdict::holds));
}

TEST_CASE("C^{B/A} constant can only grow under refinement", "[criteria]") {
  const auto t = fx::jumps_only(fx::power_density(0.6), ExponentForm::subordinator);
  const auto coarse = cba_check(t, {1.0, 1e5, 51});
  const auto fine = cba_check(t, {1.0, 1e5, 101});
  CHECK(fine.constant >= coarse.constant * (1.0 - 1e-12));
}

TEST_CASE("band ratio", "[criteria]") {
  const auto sym = band_ratio(symmetric_stable(0.8), 1.0, {{10.0, 1e3}, {1e4, 1e6}});
  CHECK(sym.verdict == std::string(verdict::holds));
  CHECK(sym.constant <= 1.0);
  const auto empty = band_ratio(fx::brownian(), 1.0, {});
  CHECK(empty.verdict == std::string(verdict::holds));
  CHECK_THROWS_AS(band_ratio(fx::brownian(), 1.0, {{1.0, 10.0}, {5.0, 20.0}}), PreconditionError);

  const auto ex = make_example33(0.3, 0.6, 2.0, 1.0, 2.0, 2.0, 2);
  const auto t = example33_triplet(ex);
  const auto probe = band_ratio(t, 1e9, ex.bands());
  REQUIRE(probe.verdict == std::string(verdict::holds));
  const auto r = band_ratio(t, probe.constant * 1.001, ex.bands());
  CHECK(r.verdict == std::string(verdict::holds));
  CHECK(band_ratio(t, probe.constant * 0.5, ex.bands()).verdict == std::string(verdict::violated));
}

TEST_CASE("envelope check", "[criteria]") {
  const auto ex = make_example33(0.3, 0.6, 2.0, 1.0, 2.0, 2.0, 2);
  CHECK(ex.c == Approx(2.0 * (2.0 / 0.6 + 1.0 / 0.4 + 8.0)));
  const auto r = envelope_check(example33_triplet(ex), 0.3, 0.6, ex.c, {1.0, 1e5, 200});
  CHECK(r.verdict == std::string(verdict::holds));
  const auto far = envelope_check(example33_triplet(ex), 0.3, 0.6, ex.c, {1.0, 1e80, 200});
  CHECK(far.verdict == std::string(verdict::holds));
  CHECK(envelope_check(fx::brownian(), 1.0, 2.0, 2.0, {1.0, 1e6, 100}).verdict == std::string(verdict::holds));
  CHECK_THROWS_AS(envelope_check(fx::brownian(), 2.0, 1.0, 2.0), PreconditionError);
}

TEST_CASE("loglog liminf trend", "[criteria]") {
  const auto zs = log_grid(20.0, 1e7, 120);
  CHECK(liminf_loglog(fx::jumps_only(make_example35(1.0, 1.0)), 1.0, zs).verdict == "evidence-positive");
  CHECK(liminf_loglog(fx::brownian(), 1.0, zs).verdict == "evidence-positive");
  const auto cp = fx::jumps_only(fx::uniform_density(), ExponentForm::subordinator);
  CHECK(liminf_loglog(cp, 1.0, zs).verdict == "evidence-negative");
  CHECK_THROWS_AS(liminf_loglog(fx::brownian(), 1.0, {2.0}), PreconditionError);
}

TEST_CASE("Blumenthal–Getoor index estimates", "[criteria]") {
  const auto b = bg_indexes(fx::brownian(), {1.0, 1e6, 200});
  CHECK(b.beta_hat == Approx(2.0).margin(0.05));
  CHECK(b.beta2_hat == Approx(2.0).margin(0.05));
  auto mixed = fx::jumps_only(fx::power_density(0.8));
  mixed.gaussian = 0.5;
  CHECK(bg_indexes(mixed, {1.0, 1e6, 200}).beta_hat == Approx(2.0).margin(0.05));
  const auto st = fx::jumps_only(fx::power_density(0.5, kInf), ExponentForm::subordinator);
  const auto s = bg_indexes(st, {1.0, 1e6, 200});
  CHECK(s.beta_hat == Approx(0.5).margin(0.05));
  CHECK(s.beta2_hat == Approx(0.5).margin(0.05));
  CHECK(s.warning.empty());
  CHECK_THROWS_AS(bg_indexes(fx::brownian(), {1.0, 100.0, 50}), PreconditionError);
}

TEST_CASE("banded example with widely spaced z_k separates the indexes", "[criteria]") {
  // z_2 far enough out that the baseline regime shows before band 2 ramps up
  const auto ex = make_example33(0.2, 0.8, 1.01, 1.0, 1.05, 2.0, 2, 1e90);
  const auto b = bg_indexes(example33_triplet(ex), {1.0, 1e66, 400});
  INFO(b.beta_hat << " " << b.beta2_hat << " " << b.warning);
  CHECK_FALSE(b.warning.empty());
  CHECK(b.beta2_hat == Approx(0.2).margin(0.1));
  CHECK(b.beta_hat == Approx(0.8).margin(0.1));
  CHECK(b.beta2_hat <= b.beta_hat);
}

TEST_CASE("perturbation constant", "[criteria]") {
  const LevyTriplet zero;
  CHECK(perturbation_check(zero, symmetric_stable(0.5), {1.0, 1e4, 50}).constant == 0.0);
  const auto same = perturbation_check(symmetric_stable(0.5), symmetric_stable(0.5), {1.0, 1e4, 50});
  CHECK(same.constant < 1.0);
  const auto st = fx::jumps_only(fx::power_density(0.5, kInf), ExponentForm::subordinator);
  CHECK(perturbation_check(drift(1.0), st, {1.0, 1e6, 100}).verdict == std::string(verdict::unbounded));
}

TEST_CASE("banded example construction", "[criteria]") {
  const auto base = make_example33(0.3, 0.6, 2.0, 1.0, 2.0, 2.0, 0);
  REQUIRE(base.density.pieces.size() == 1);
  CHECK(density_at(base.density, 0.5) == Approx(std::pow(0.5, -1.3) / 2.0));

  const auto ex = make_example33(0.3, 0.6, 2.0, 1.0, 2.0, 2.0, 2);
  REQUIRE(ex.z.size() == 2);
  CHECK(ex.z[1] == std::exp2(52.0));
  CHECK(ex.z[1] > ex.growth[0]);
  CHECK(validate_triplet(example33_triplet(ex)).ok());
  for (double x : fx::logspace(1e-80, 1.0, 2000)) {
    const double r = density_at(ex.density, x);
    CHECK(r >= std::pow(x, -1.3) / 2.0 * (1.0 - 1e-12));
    CHECK(r <= 2.0 * std::pow(x, -1.6) * (1.0 + 1e-12));
  }
  for (std::size_t k = 0; k < ex.z.size(); ++k)
    for (double x : fx::logspace(0.5 / ex.growth[k] * (1.0 + 1e-12), 0.999 / ex.z[k], 50))
      CHECK(density_at(ex.density, x) >= std::pow(x, -1.6) * (1.0 - 1e-12));

  const auto big = make_example33(0.3, 0.6, 2.0, 1.0, 2.0, 2.0, 10);
  CHECK(big.truncated);

  const auto weak = make_example33(0.3, 0.6, 2.0, 0.1, 2.0, 2.0, 1);  // kappa1 c1 < 1
  for (double x : fx::logspace(1e-10, 1.0, 500))
    CHECK(density_at(weak.density, x) >= std::pow(x, -1.3) / 2.0 * (1.0 - 1e-12));
}

TEST_CASE("log-log example density", "[criteria]") {
  const auto d = make_example35(2.0, 1.0);
  const double e = std::exp(1.0);
  CHECK(density_at(d, std::exp(-e)) == Approx(2.0 * std::exp(2.0 * e)));
  CHECK(d.mirror);
  CHECK(validate_triplet(fx::jumps_only(d)).ok());
}
