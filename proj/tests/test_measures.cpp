#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "huntkit/measures.hpp"

using namespace huntkit;
using Catch::Approx;

namespace {

FiniteMeasure unit_atom() { return {AtomsMeasure{{Atom{0.0, 1.0}}}}; }
FiniteMeasure std_gaussian(double mass = 1.0) { return {GaussianMeasure{0.0, 1.0, mass}}; }

// Midpoint rule for 2 ∫_a^b g on a fine grid.
template <class G>
double midpoint2(G g, double a, double b, int n = 2'000'000) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g(a + (i + 0.5) * h);
  return 2.0 * h * s;
}

}  // namespace

TEST_CASE("fourier closed forms", "[measures]") {
  CHECK(std::abs(fourier(unit_atom(), 3.7) - std::complex<double>(1.0, 0.0)) < 1e-15);
  const FiniteMeasure pm{AtomsMeasure{{Atom{1.0, 0.5}, Atom{-1.0, 0.5}}}};
  for (double z : {0.0, 0.4, 2.0, 9.0}) CHECK(fourier(pm, z).real() == Approx(std::cos(z)).margin(1e-15));
  CHECK(fourier(std_gaussian(), 2.0).real() == Approx(std::exp(-2.0)).epsilon(1e-14));
  const FiniteMeasure u{UniformMeasure{0.0, 2.0, 3.0}};
  CHECK(std::abs(fourier(u, 0.0)) == Approx(3.0));
}

TEST_CASE("|nu^(z)| <= nu^(0)", "[measures]") {
  const std::vector<FiniteMeasure> ms{
      {AtomsMeasure{{Atom{0.3, 0.2}, Atom{-2.0, 1.1}}}}, std_gaussian(2.0), {UniformMeasure{-1.0, 3.0, 0.5}}};
  for (const auto& m : ms)
    for (double z = -50.0; z <= 50.0; z += 0.37) {
      CHECK(std::abs(fourier(m, z)) <= std::abs(fourier(m, 0.0)) * (1.0 + 1e-15));
      CHECK(fourier_sq(m, z) <= fourier_sq_bound(m, z) * (1.0 + 1e-12) + 1e-300);
    }
}

TEST_CASE("c(lambda) with B = 1 has a closed form", "[measures]") {
  const LevyTriplet none;
  const auto e = c_lambda(std_gaussian(), none, 1.0, 20.0);
  CHECK(e.value_at_R == Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-10));
  CHECK(e.converged);
}

TEST_CASE("Brownian with a Gaussian measure has converged finite energy", "[measures]") {
  const auto e = one_energy(std_gaussian(), fx::brownian(), 100.0);
  REQUIRE(e.tail_bound.has_value());
  CHECK(e.converged);
  // A/B^2 = 1/(1 + z^2/2)
  const double ref = midpoint2([](double z) { return std::exp(-z * z) / (1.0 + z * z / 2.0); }, 0.0, 40.0);
  CHECK(e.value_at_R == Approx(ref).epsilon(1e-4));
}

TEST_CASE("unit atom with Brownian motion, grid refinement", "[measures]") {
  EnergyOptions coarse;
  EnergyOptions fine;
  fine.step = default_step(unit_atom()) / 10.0;
  const auto a = one_energy(unit_atom(), fx::brownian(), 50.0, coarse);
  const auto b = one_energy(unit_atom(), fx::brownian(), 50.0, fine);
  CHECK(std::abs(a.value_at_R - b.value_at_R) < 0.01 * b.value_at_R);
}

TEST_CASE("tail bound is unknown without an envelope", "[measures]") {
  const auto t = fx::jumps_only(fx::power_density(0.5));
  const auto e = one_energy(std_gaussian(), t, 50.0);
  CHECK_FALSE(e.tail_bound.has_value());
  CHECK_FALSE(e.converged);
  auto with_env = t;
  with_env.density.envelope = Envelope{1.0, 0.5, 0.5};
  const auto f = one_energy(std_gaussian(), with_env, 50.0);
  CHECK(f.tail_bound.has_value());
  CHECK(f.converged);
}

TEST_CASE("functionals vanish with mass and scale quadratically", "[measures]") {
  const auto t = fx::brownian();
  const FiniteMeasure tiny{AtomsMeasure{{Atom{0.0, 1e-200}}}};
  CHECK(one_energy(tiny, t, 50.0).value_at_R < 1e-300);
  const double v1 = one_energy(std_gaussian(1.0), t, 50.0).value_at_R;
  const double v3 = one_energy(std_gaussian(3.0), t, 50.0).value_at_R;
  CHECK(v3 == Approx(9.0 * v1).epsilon(1e-13));
  const double c1 = condition_C0(std_gaussian(1.0), t, 50.0).value_at_R;
  const double c3 = condition_C0(std_gaussian(3.0), t, 50.0).value_at_R;
  CHECK(c3 == Approx(9.0 * c1).epsilon(1e-13));
}

TEST_CASE("C0 dominates C^delta and C^delta is bounded by the energy ratio", "[measures]") {
  const auto t = fx::brownian();
  const auto m = unit_atom();
  const double R = 200.0;
  const ExponentTable table(t, 2.0 * R);
  EnergyOptions opt;
  opt.table = &table;
  const double c0 = condition_C0(m, t, R, opt).value_at_R;
  const double c1 = condition_Cdelta(m, t, 1.0, R, opt).value_at_R;
  const double en = one_energy(m, t, R, opt).value_at_R;
  // [loglog(2+B)]^{1+delta} <= loglog(2+B) only once loglog(2+B) >= 1
  const double b_star = std::exp(std::exp(1.0)) - 2.0;
  const auto w0 = weights::c_delta(0.0);
  const auto w1 = weights::c_delta(1.0);
  for (double b = 1.0; b < 1e6; b *= 1.01) {
    if (b >= b_star) CHECK(w0(b, b) >= w1(b, b));
    else CHECK(w0(b, b) < w1(b, b));
  }
  CHECK(c0 > 0.0);
  double sup = 0.0;
  const auto wd = weights::c_delta(1.0);
  const auto we = weights::energy();
  for (double z = 0.0; z <= R; z += 0.01) {
    const auto [a, b] = table.at(z);
    sup = std::max(sup, wd(a, b) / we(a, b));
  }
  CHECK(c1 <= en * sup * (1.0 + 1e-12));
}

TEST_CASE("log band on Brownian motion matches direct quadrature", "[measures][bands]") {
  const auto t = fx::brownian();
  const double y = 3.0, vs = 2.0;
  const auto r = condition_Clog_sum(unit_atom(), t, vs, {y}, 100.0);
  REQUIRE(r.bands.size() == 1);
  REQUIRE(r.bands[0].z_intervals.size() == 1);
  const double za = std::sqrt(2.0 * (y - 1.0)), zb = std::sqrt(2.0 * (std::pow(y, vs) - 1.0));
  CHECK(r.bands[0].z_intervals[0].first == Approx(za).epsilon(1e-12));
  CHECK(r.bands[0].z_intervals[0].second == Approx(zb).epsilon(1e-12));
  const double ref = midpoint2([](double z) {
    const double b = 1.0 + z * z / 2.0;
    return 1.0 / (b * std::log(b));
  }, za, zb);
  CHECK(r.total == Approx(ref).epsilon(1e-4));
}

TEST_CASE("bands outside the reachable B range contribute zero", "[measures][bands]") {
  const auto r = condition_Clog_sum(unit_atom(), fx::brownian(), 2.0, {1e9}, 10.0);
  CHECK(r.total == 0.0);
  CHECK(r.bands[0].status == "empty");
}

TEST_CASE("disjoint bands sum to the band over their union", "[measures][bands]") {
  const auto t = fx::brownian();
  const auto m = std_gaussian();
  const auto split = condition_Clog_sum(m, t, 2.0, {2.0, 4.0}, 50.0);
  const auto whole = condition_Clog_sum(m, t, 4.0, {2.0}, 50.0);
  CHECK(std::abs(split.total - whole.total) <= 1e-10 * whole.total);
}

TEST_CASE("five geometric bands stay below the full log-weighted integral", "[measures][bands]") {
  const auto t = fx::brownian();
  const auto m = std_gaussian();
  const auto r = condition_Clog_sum(m, t, 2.0, {2.0, 4.0, 16.0, 256.0, 65536.0}, 50.0);
  CHECK(r.bands.size() == 5);
  const double full = midpoint2([&](double z) {
    const double b = 1.0 + z * z / 2.0;
    return b >= 2.0 ? fourier_sq(m, z) / (b * std::log(b)) : 0.0;
  }, 0.0, 50.0);
  CHECK(r.total <= full * (1.0 + 1e-4));
  CHECK(r.total == Approx(full).epsilon(1e-4));
}

TEST_CASE("loglog band 16 <= B < 256 on Brownian motion", "[measures][bands]") {
  const auto t = fx::brownian();
  const auto r = condition_Cloglog_sum(unit_atom(), t, 2.0, {2.0}, 100.0);
  REQUIRE(r.bands.size() == 1);
  CHECK(r.bands[0].y_lo == Approx(16.0));
  CHECK(r.bands[0].y_hi == Approx(256.0));
  const double za = std::sqrt(30.0), zb = std::sqrt(510.0);
  const double ref = midpoint2([](double z) {
    const double b = 1.0 + z * z / 2.0;
    return 1.0 / (b * std::log(b) * std::log(std::log(b)));
  }, za, zb);
  CHECK(r.total == Approx(ref).epsilon(1e-4));
}

TEST_CASE("loglog diagnostics: harmonic sums and unreachable bands", "[measures][bands]") {
  const auto r = condition_Cloglog_sum(unit_atom(), fx::brownian(), 2.0, {2.0, 4.0, 6.0, 8.0, 10.0}, 100.0);
  REQUIRE(r.harmonic_partial_sums.size() == 5);
  CHECK(r.harmonic_partial_sums.back() == Approx(0.5 * (1 + 0.5 + 1.0 / 3 + 0.25 + 0.2)));
  CHECK(r.bands[4].status == "unreachable at desk scale");
  CHECK(condition_Cloglog_sum(unit_atom(), fx::brownian(), 2.0, {}, 10.0).total == 0.0);
  CHECK_THROWS_AS(condition_Cloglog_sum(unit_atom(), fx::brownian(), 2.0, {2.0, 3.0}, 10.0), PreconditionError);
}
