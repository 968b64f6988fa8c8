#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "huntkit/exponent.hpp"
#include "huntkit/oracle.hpp"

using namespace huntkit;
using Catch::Approx;

TEST_CASE("Brownian exponent", "[exponent]") {
  const auto v = eval_exponent(fx::brownian(), 2.0);
  CHECK(v.psi_re == 2.0);
  CHECK(v.psi_im == 0.0);
  CHECK(v.A == 3.0);
  CHECK(v.B == 3.0);
  const auto g = eval_exponent_grid(fx::brownian(), {1.0, 2.0, 3.0});
  REQUIRE(g.size() == 3);
  CHECK(g[0].A == 1.5);
  CHECK(g[1].A == 3.0);
  CHECK(g[2].A == 5.5);
  CHECK(eval_exponent_grid(fx::brownian(), {}).empty());
}

TEST_CASE("z = 0 gives psi = 0", "[exponent]") {
  const auto v = eval_exponent(fx::jumps_only(fx::power_density(1.5)), 0.0);
  CHECK(v.psi_re == 0.0);
  CHECK(v.psi_im == 0.0);
  CHECK(v.A == 1.0);
  CHECK(v.B == 1.0);
}

TEST_CASE("pure-jump exponent matches oracle assembly", "[exponent][oracle]") {
  const auto t = fx::jumps_only(fx::power_density(0.5));
  const auto o = oracle_riemann(t.density, 10.0, 4'000'000);
  const auto v = eval_exponent(t, 10.0);
  CHECK(fx::close(v.psi_re, o.one_minus_cos, 0.0, 1e-6));
  CHECK(fx::close(v.psi_im, o.x_minus_sin, 0.0, 1e-6));
}

TEST_CASE("subordinator form uses the uncompensated sine", "[exponent]") {
  auto t = fx::jumps_only(fx::power_density(0.5), ExponentForm::subordinator);
  t.drift = 0.25;
  const auto o = oracle_riemann(t.density, 3.0, 4'000'000);
  const auto v = eval_exponent(t, 3.0);
  CHECK(fx::close(v.psi_im, -0.25 * 3.0 - o.sin, 0.0, 1e-6));
}

TEST_CASE("pieces beyond 1 use the uncompensated sine", "[exponent]") {
  LevyDensity d;
  d.pieces.push_back(fx::power_piece(0.0, 3.0, 1.0, 0.5));
  const auto t = fx::jumps_only(d);
  const auto v = eval_exponent(t, 5.0);
  const auto small = oracle_riemann(restrict_to(d, 0.0, 1.0), 5.0, 4'000'000);
  const auto big = oracle_riemann(restrict_to(d, 1.0, 3.0), 5.0, 1'000'000);
  CHECK(fx::close(v.psi_im, small.x_minus_sin - big.sin, 1e-8, 1e-6));
}

TEST_CASE("Hermitian symmetry and ordering A <= B", "[exponent]") {
  const auto t = fx::jumps_only(fx::power_density(1.3));
  for (double z : {0.7, 12.0, 3e3}) {
    const auto p = eval_exponent(t, z);
    const auto m = eval_exponent(t, -z);
    CHECK(p.psi_re == m.psi_re);
    CHECK(p.psi_im == -m.psi_im);
    CHECK(p.A >= 1.0);
    CHECK(p.B >= p.A);
  }
}

TEST_CASE("mirrored densities have zero imaginary part", "[exponent]") {
  auto d = fx::power_density(1.2);
  d.mirror = true;
  const auto v = eval_exponent(fx::jumps_only(d), 40.0);
  CHECK(v.psi_im == 0.0);
  auto one = fx::power_density(1.2);
  CHECK(v.psi_re == Approx(2.0 * eval_exponent(fx::jumps_only(one), 40.0).psi_re).epsilon(1e-14));
}

TEST_CASE("grid equals pointwise evaluation bitwise", "[exponent]") {
  const auto t = fx::jumps_only(fx::power_density(0.8));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-3.0, 5.0);
  std::vector<double> zs;
  for (int i = 0; i < 100; ++i) zs.push_back(std::pow(10.0, u(gen)));
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  const auto g = eval_exponent_grid(t, zs);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const auto v = eval_exponent(t, zs[i]);
    CHECK(g[i].psi_re == v.psi_re);
    CHECK(g[i].psi_im == v.psi_im);
  }
  CHECK_THROWS_AS(eval_exponent_grid(t, {2.0, 1.0}), PreconditionError);
}

TEST_CASE("psi_re nondecreasing in the Gaussian coefficient", "[exponent]") {
  auto t = fx::jumps_only(fx::power_density(0.8));
  double prev = -1.0;
  for (double q : {0.0, 0.5, 2.0}) {
    t.gaussian = q;
    const double v = eval_exponent(t, 6.0).psi_re;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("CSV output has the documented header", "[exponent]") {
  std::ostringstream os;
  write_exponent_csv(os, {eval_exponent(fx::brownian(), 2.0)});
  CHECK(os.str() == "z,psi_re,psi_im,A,B,abs_err\n2,2,0,3,3,0\n");
}
