#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hxdram/thermo/coefficients.hpp"
#include "hxdram/thermo/thermal.hpp"

using namespace hxdram::thermo;

namespace {

const double kPi = std::numbers::pi;

DesignVector dram_mean_design() { return {0.0956, 0.2310, 0.24864e-3, 3.4e-3, 4.292, 0.0234, 2.05e-3}; }

// Effectiveness of a 1-shell / 2-tube-pass exchanger (tube side) as a
// function of NTU, then F as the ratio of counter-flow NTU to actual NTU.
double f_by_ntu(double r, double p) {
  const double w = std::sqrt(1.0 + r * r);
  auto eff = [&](double ntu) {
    const double x = ntu * w / 2.0;
    return 2.0 / (1.0 + r + w / std::tanh(x));
  };
  double lo = 1e-9, hi = 50.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eff(mid) < p ? lo : hi) = mid;
  }
  const double ntu = 0.5 * (lo + hi);
  const double ntu_cf = std::log((1.0 - r * p) / (1.0 - p)) / (1.0 - r);
  return ntu_cf / ntu;
}

}  // namespace

TEST_CASE("heat duty of the naphtha / water case") {
  const auto c = CaseSpec::naphtha_water();
  const auto q = heat_duty(c);
  CHECK(q.duty_w == doctest::Approx(2.7 * 2646.06 * 74.0).epsilon(1e-12));
  CHECK(q.duty_w == doctest::Approx(528682.788).epsilon(1e-9));
  const double q_cold = 30.0 * 4186.8 * (37.21 - 33.0);
  CHECK(q_cold == doctest::Approx(528792.84).epsilon(1e-9));
  CHECK(q.balance_residual < 1e-3);
  CHECK(q.balance_residual == doctest::Approx(std::abs(q.duty_w - q_cold) / q.duty_w));
}

TEST_CASE("zero duty is an invalid case") {
  auto c = CaseSpec::naphtha_water();
  c.shell.outlet_temperature_c = c.shell.inlet_temperature_c;
  CHECK_THROWS_AS(c.validate(), ModelError);
  try {
    c.validate();
  } catch (const ModelError& e) {
    CHECK(e.code() == ModelErrc::invalid_case);
  }
}

TEST_CASE("log-mean temperature difference") {
  const double dt1 = 114.0 - 37.21, dt2 = 40.0 - 33.0;
  const double expected = (dt1 - dt2) / std::log(dt1 / dt2);
  CHECK(lmtd(114, 40, 33, 37.21) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lmtd(114, 40, 33, 37.21) == doctest::Approx(29.14).epsilon(1e-3));
  CHECK(lmtd(60, 40, 30, 50) == doctest::Approx(10.0).epsilon(1e-15));

  SUBCASE("temperature cross") {
    try {
      lmtd(50, 40, 45, 55);
      FAIL("expected temperature cross");
    } catch (const ModelError& e) {
      CHECK(e.code() == ModelErrc::temperature_cross);
    }
  }
}

TEST_CASE("F correction against an independent effectiveness-NTU construction") {
  const auto c = CaseSpec::naphtha_water();
  const double r = capacity_ratio(c), s = thermal_effectiveness(c);
  CHECK(r == doctest::Approx(74.0 / 4.21));
  CHECK(s == doctest::Approx(4.21 / 81.0));
  const double f = f_correction(r, s);
  CHECK(f > 0.8);
  CHECK(f < 1.0);
  CHECK(f == doctest::Approx(f_by_ntu(r, s)).epsilon(1e-8));
  CHECK(f == doctest::Approx(0.9108).epsilon(1e-3));

  for (double rr : {0.3, 0.8, 1.5, 3.0})
    for (double ss : {0.1, 0.2, 0.3}) {
      if (rr * ss > 0.5) continue;
      CAPTURE(rr);
      CAPTURE(ss);
      CHECK(f_correction(rr, ss) == doctest::Approx(f_by_ntu(rr, ss)).epsilon(1e-7));
    }
}

TEST_CASE("F correction limits") {
  CHECK(f_correction(2.0, 1e-7) == doctest::Approx(1.0).epsilon(1e-6));
  const double at_one = f_correction(1.0, 0.5);
  CHECK(std::isfinite(at_one));
  CHECK(at_one == doctest::Approx(f_correction(1.0 + 1e-6, 0.5)).epsilon(1e-6));
  CHECK(at_one == doctest::Approx(f_correction(1.0 - 1e-6, 0.5)).epsilon(1e-6));
  CHECK_THROWS_AS(f_correction(5.0, 0.5), ModelError);
}

TEST_CASE("geometry from the sampled mean design") {
  LayoutConfig layout;
  const auto x = dram_mean_design();
  const auto g = derive_geometry(x, layout, 37.16);
  const int nt = static_cast<int>(std::ceil(37.16 / (kPi * 0.0234 * 4.292)));
  CHECK(nt == 118);
  CHECK(g.tube_count == 118);
  const double dotl = 0.0234 * std::pow(118.0 / 0.249, 1.0 / 2.207);
  CHECK(g.bundle_diameter_m == doctest::Approx(dotl).epsilon(1e-12));
  CHECK(g.bundle_diameter_m == doctest::Approx(0.3815).epsilon(1e-3));
  CHECK(g.shell_diameter_m == doctest::Approx(dotl / 0.95 + 0.0034).epsilon(1e-12));
  CHECK(g.shell_diameter_m == doctest::Approx(0.405).epsilon(2e-3));
  CHECK(g.baffle_count == static_cast<int>(std::floor(4.292 / 0.0956)) - 1);
  CHECK(g.tube_pitch_m == doctest::Approx(1.25 * 0.0234));
}

TEST_CASE("geometry edge points") {
  CHECK(bundle_diameter(0.02, 2, BundleConstants{2.0, 2.207}) == doctest::Approx(0.02).epsilon(1e-15));
  const double theta = baffle_cut_angle(1.0, 0.5, 1.0);
  CHECK(theta == doctest::Approx(kPi));
  CHECK(crossflow_tube_fraction(theta) == doctest::Approx(0.0).scale(1.0));
  CHECK(baffle_count(1.0, 0.9) == 1);
  CHECK(baffle_count(1.0, 0.1) == 9);
}

TEST_CASE("infeasible geometry is reported") {
  LayoutConfig layout;
  auto x = dram_mean_design();
  CHECK_THROWS_AS(derive_geometry(x, layout, 0.0), ModelError);
  x.baffle_cut_frac = 1.2;
  try {
    derive_geometry(x, layout, 30.0);
    FAIL("expected infeasible geometry");
  } catch (const ModelError& e) {
    CHECK(e.code() == ModelErrc::infeasible_geometry);
  }
}

TEST_CASE("shell-side correction factors") {
  CHECK(baffle_cut_factor(0.625) == doctest::Approx(1.0));
  CHECK(bypass_factor(0.3, 0.5, 5000.0) == 1.0);
  CHECK(bypass_factor(0.3, 0.0, 50.0) == doctest::Approx(std::exp(-1.35 * 0.3)));
  CHECK(bypass_factor(0.3, 0.0, 500.0) == doctest::Approx(std::exp(-1.25 * 0.3)));
  CHECK(leakage_factor(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(leakage_factor(1.0, 0.5) == doctest::Approx(std::exp(-1.1)));
}

TEST_CASE("pressure-drop factors") {
  CHECK(zeta_spacing(0.1, 0.1, 0.1) == doctest::Approx(2.0));
  CHECK(zeta_leakage(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(zeta_bypass(0.4, 0.5) == 1.0);
  CHECK(zeta_bypass(0.4, 0.0) == doctest::Approx(std::exp(-2.7 * 0.4)));
}

TEST_CASE("factor bounds over their domains") {
  for (double fc = 0.0; fc <= 0.833; fc += 0.001) {
    const double jc = baffle_cut_factor(fc);
    CHECK(jc >= 0.55);
    CHECK(jc <= 1.15);
  }
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double rs = unit(gen), rlm = 2.0 * unit(gen), rb = unit(gen), nss = unit(gen);
    const double re = 1.0 + 1e5 * unit(gen);
    const double jl = leakage_factor(rs, rlm), jb = bypass_factor(rb, nss, re);
    const double zb = zeta_bypass(rb, nss), zl = zeta_leakage(rs, rlm);
    CHECK((jl > 0.0 && jl <= 1.0));
    CHECK((jb > 0.0 && jb <= 1.0));
    CHECK((zb > 0.0 && zb <= 1.0));
    CHECK((zl > 0.0 && zl <= 1.0));
  }
}

TEST_CASE("Prandtl numbers of both streams") {
  const auto c = CaseSpec::naphtha_water();
  LayoutConfig layout;
  const auto r = size_exchanger(dram_mean_design(), c, layout);
  CHECK(r.tube.prandtl == doctest::Approx(4186.8 * 0.00071 / 0.63));
  CHECK(r.tube.prandtl == doctest::Approx(4.72).epsilon(1e-3));
  CHECK(r.shell.prandtl == doctest::Approx(2646.06 * 3.7e-4 / 0.11));
  CHECK(r.shell.prandtl == doctest::Approx(8.90).epsilon(1e-3));
}

TEST_CASE("tube velocity scales inversely with tube count") {
  const auto c = CaseSpec::naphtha_water();
  LayoutConfig layout;
  Geometry g;
  g.tube_count = 100;
  const auto a = tube_htc(dram_mean_design(), c, g, layout);
  g.tube_count = 200;
  const auto b = tube_htc(dram_mean_design(), c, g, layout);
  CHECK(b.velocity == doctest::Approx(a.velocity / 2.0).epsilon(1e-14));
}

TEST_CASE("overall coefficient") {
  CHECK(overall_u(800.0, 1200.0, 0.02, 0.02, 1e300, 0.0, 0.0) ==
        doctest::Approx(1.0 / (1.0 / 800.0 + 1.0 / 1200.0)).epsilon(1e-14));
  // 1/U = 1e-3 + 2e-4 + 4.098e-5 + 4.850e-4 + 1.2124e-3
  CHECK(overall_u(1000.0, 1000.0, 0.0234, 0.0193, 55.0, 0.0002, 0.0004) == doctest::Approx(340.32).epsilon(1e-4));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> h(50.0, 5000.0);
  for (int i = 0; i < 200; ++i) {
    const double ho = h(gen);
    CHECK(overall_u(ho, h(gen), 0.025, 0.021, 16.0, 2e-4, 4e-4) < ho);
  }
}

TEST_CASE("tube-side pressure drop") {
  CHECK(tube_friction(1e4) == doctest::Approx(0.007291).epsilon(1e-4));
  const auto c = CaseSpec::naphtha_water();
  LayoutConfig one, two;
  one.n_passes = 1;
  two.n_passes = 2;
  const Geometry g;
  const auto x = dram_mean_design();
  CHECK(tube_dp(x, c, g, one, 1e4, 0.0).dp_tube == 0.0);
  const double dp1 = tube_dp(x, c, g, one, 2e4, 1.3).dp_tube;
  CHECK(tube_dp(x, c, g, two, 2e4, 1.3).dp_tube == doctest::Approx(2.0 * dp1).epsilon(1e-15));
}

TEST_CASE("pumping power") {
  const auto c = CaseSpec::naphtha_water();
  CHECK(pumping_power(8600, 22600, c) == doctest::Approx((8600.0 * 30 / 1000 + 22600.0 * 2.7 / 656) / 0.85));
  CHECK(pumping_power(8600, 22600, c) == doctest::Approx(413.0).epsilon(1e-3));
  CHECK(pumping_power(0, 0, c) == 0.0);
  auto ideal = c;
  ideal.pump_efficiency = 1.0;
  CHECK(pumping_power(8600, 22600, c) * 0.85 == doctest::Approx(pumping_power(8600, 22600, ideal)).epsilon(1e-15));
  for (double k : {0.5, 2.0, 7.0})
    CHECK(pumping_power(k * 8600, k * 22600, c) == doctest::Approx(k * pumping_power(8600, 22600, c)).epsilon(1e-15));
}

TEST_CASE("LMTD continuity across the equal-difference branch") {
  const double dt2 = 10.0;
  const double dt1 = dt2 * (1.0 + 1e-6);
  const double formula = (dt1 - dt2) / std::log(dt1 / dt2);
  CHECK(lmtd(dt1 + 30.0, 40.0, 30.0, 30.0) == doctest::Approx(formula).epsilon(1e-9));
  CHECK(lmtd(dt1 + 30.0, 40.0, 30.0, 30.0) == doctest::Approx(0.5 * (dt1 + dt2)).epsilon(1e-9));
  CHECK(lmtd(40.0, 40.0, 30.0, 30.0 - 1e-14) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("area decreases with U and with the mean temperature difference") {
  const double q = 5e5;
  double prev = required_area(q, 100.0, 30.0, 0.9);
  for (double u = 110.0; u < 2000.0; u += 10.0) {
    const double a = required_area(q, u, 30.0, 0.9);
    CHECK(a < prev);
    prev = a;
  }
  prev = required_area(q, 300.0, 5.0, 0.9);
  for (double dt = 6.0; dt < 80.0; dt += 1.0) {
    const double a = required_area(q, 300.0, dt, 0.9);
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("sizing is deterministic, self-consistent and idempotent") {
  const auto c = CaseSpec::naphtha_water();
  LayoutConfig layout;
  const std::vector<DesignVector> designs = {
      dram_mean_design(),
      {0.079, 0.16515, 0.204e-3, 3.279e-3, 3.426, 0.019578, 1.652e-3},
      {0.06, 0.25, 0.381e-3, 3.0e-3, 10.7, 0.0381, 3.405e-3},
  };
  for (const auto& x : designs) {
    const auto a = size_exchanger(x, c, layout);
    const auto b = size_exchanger(x, c, layout);
    CHECK(a.converged);
    CHECK(a.area_m2 == b.area_m2);
    CHECK(a.shell_dp.dp_shell == b.shell_dp.dp_shell);
    CHECK(a.tube_dp.dp_tube == b.tube_dp.dp_tube);
    CHECK(a.u_overall == b.u_overall);

    const double per_tube = kPi * x.tube_outer_diameter_m * x.tube_length_m;
    CHECK(per_tube * a.geometry.tube_count >= a.area_m2);
    CHECK(a.area_m2 > per_tube * (a.geometry.tube_count - 1));

    const auto again = size_exchanger(x, c, layout, a.u_overall);
    CHECK(again.iterations <= 2);
    CHECK(again.area_m2 == doctest::Approx(a.area_m2).epsilon(1e-9));
  }
}

TEST_CASE("divergence carries the last iterate") {
  const auto c = CaseSpec::naphtha_water();
  LayoutConfig layout;
  layout.max_iterations = 1;
  try {
    size_exchanger(dram_mean_design(), c, layout, 50.0);
    FAIL("expected divergence");
  } catch (const ModelError& e) {
    CHECK(e.code() == ModelErrc::diverged);
    REQUIRE(e.last_iterate().has_value());
    CHECK(e.last_iterate()->iterations == 1);
    REQUIRE(e.design().has_value());
    CHECK(*e.design() == dram_mean_design());
  }
}

TEST_CASE("leakage factor switch") {
  const auto c = CaseSpec::naphtha_water();
  LayoutConfig base, full;
  full.apply_leakage_factor = true;
  const auto a = size_exchanger(dram_mean_design(), c, base);
  const auto b = size_exchanger(dram_mean_design(), c, full);
  CHECK(b.area_m2 > a.area_m2);
  CHECK(a.shell.j_leakage < 1.0);
}

TEST_CASE("coefficient table") {
  const auto& t = CoefficientTable::builtin();
  CHECK(t.version() == 1);
  const auto hi = t.lookup(TubeLayout::triangular_30, 2e4);
  CHECK(hi.coefficients.a1 == doctest::Approx(0.321));
  CHECK(hi.coefficients.a2 == doctest::Approx(-0.388));
  CHECK_FALSE(hi.clamped);
  CHECK(t.lookup(TubeLayout::triangular_30, 1e7).clamped);
  const auto k = t.bundle(TubeLayout::triangular_30, 2);
  CHECK(k.k1 == doctest::Approx(0.249));
  CHECK(k.n1 == doctest::Approx(2.207));
  const auto k6 = t.bundle(TubeLayout::square_90, 6);
  CHECK(k6.k1 == doctest::Approx(0.158));

  std::ifstream in(HXDRAM_DATA_DIR "/bell_delaware_coefficients.txt");
  REQUIRE(in.good());
  CHECK(CoefficientTable::parse(in) == t);

  std::istringstream bad("version 1\nband 30 0 10 oops\n");
  try {
    CoefficientTable::parse(bad);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
