#include "doctest.h"

#include <cmath>

#include "fcspdc/phasematch.hpp"
#include "fcspdc/units.hpp"

using namespace fcspdc;

TEST_SUITE_BEGIN("phasematch");

TEST_CASE("catalog size per crystal") {
  CHECK(list_configs(Crystal::Ktp).size() == 8);
  CHECK(list_configs(Crystal::Ln).size() == 4);
  CHECK(list_configs(Crystal::MgLn).size() == 4);
}

TEST_CASE("row II polarizations") {
  const auto& c = config_by_id(Crystal::Ktp, 2);
  CHECK(c.spdc_pump == Axis::Y);
  CHECK(c.spdc_idler == Axis::Z);
  CHECK(c.spdc_signal == Axis::Y);
  CHECK(c.sfc_escort == Axis::Z);
  CHECK(c.sfc_idler == Axis::Z);
  CHECK(c.sfc_converted == Axis::Z);
  CHECK(c.roman() == "II");
}

TEST_CASE("catalog invariants: shared idler and orthogonal outputs") {
  for (const auto& c : list_configs(Crystal::Ktp)) {
    CHECK(c.spdc_idler == c.sfc_idler);           // same photon is converted
    CHECK(c.sfc_converted != c.spdc_signal);      // separable at the splitter
  }
  for (const auto& c : list_configs(Crystal::Ln)) {
    CHECK(c.spdc_idler == c.sfc_idler);
    CHECK(c.sfc_converted != c.spdc_signal);
    CHECK(c.spdc_pump != Axis::X);
    CHECK(c.spdc_signal != Axis::X);
  }
}

TEST_CASE("frequency relations closure and ratios") {
  for (double ldeg : {466.0, 780.0, 1064.0, 1550.0}) {
    const FrequencyRelations rel(ldeg);
    CHECK(rel.omega_pump() == doctest::Approx(2.0 * rel.omega_escort()).epsilon(1e-12));
    CHECK(rel.omega_fc() == doctest::Approx(rel.omega_signal()).epsilon(1e-12));
    CHECK(rel.omega_idler() == doctest::Approx(rel.omega_signal() / 3.0).epsilon(1e-12));
    CHECK(rel.omega_pump() ==
          doctest::Approx(rel.omega_signal() + rel.omega_idler()).epsilon(1e-12));
    // identity under reconstruction
    CHECK(rel.lambda_signal_nm == doctest::Approx(ldeg).epsilon(1e-12));
    CHECK(rel.lambda_pump_nm * 4.0 / 3.0 == doctest::Approx(ldeg).epsilon(1e-12));
  }
}

TEST_CASE("mismatch vanishes at the solved period and scales as expected") {
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  const auto& config = config_by_id(Crystal::Ktp, 2);
  const FrequencyRelations rel(780.0);
  const PolingSolution grating = solve_spdc_poling(ktp, config, rel);
  CHECK(grating.period_um > 0.0);

  const double dk0 = spdc_mismatch(ktp, config, rel.omega_pump(), rel.omega_signal(),
                                   rel.omega_idler(), grating);
  CHECK(std::abs(dk0) < 1e-9);

  // doubling the period at fixed sign shifts dk by +- pi / period
  PolingSolution doubled = grating;
  doubled.period_um *= 2.0;
  const double dk2 = spdc_mismatch(ktp, config, rel.omega_pump(), rel.omega_signal(),
                                   rel.omega_idler(), doubled);
  CHECK(dk2 - dk0 ==
        doctest::Approx(grating.sign * units::pi / grating.period_um).epsilon(1e-9));

  // SFC leg round trip
  const PolingSolution sfc = solve_sfc_poling(ktp, config, rel);
  CHECK(std::abs(sfc_mismatch(ktp, config, rel.omega_idler(), rel.omega_fc(), sfc)) < 1e-9);
}

TEST_CASE("detuned mismatch follows the first-order expansion") {
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  const auto& config = config_by_id(Crystal::Ktp, 2);
  const FrequencyRelations rel(780.0);
  const PolingSolution grating = solve_spdc_poling(ktp, config, rel);

  const double kp = ktp.inverse_group_velocity(config.spdc_pump, rel.lambda_pump_nm);
  const double ks = ktp.inverse_group_velocity(config.spdc_signal, rel.lambda_signal_nm);
  const double slope_expected = kp - ks;  // d dk / d w_s

  const double dw = rel.omega_signal() * 1e-4;
  const double dk_plus = spdc_mismatch(ktp, config, rel.omega_pump() + dw,
                                       rel.omega_signal() + dw, rel.omega_idler(), grating);
  CHECK(dk_plus / dw == doctest::Approx(slope_expected).epsilon(1e-2));
}

TEST_CASE("orientation slopes at the matched limits") {
  // Construct regimes through the public API by scanning wavelengths where
  // the derivative relations are known from the GVM trace below; here check
  // algebraic limits via near-equal derivatives on a real crystal.
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  const auto& config = config_by_id(Crystal::Ktp, 2);

  // Circular case: at the degenerate matching wavelength the ridge runs at
  // +45 degrees, orthogonal to the antidiagonal pump envelope.
  const auto curves = trace_gvm_curves(ktp, conventional_type2(Crystal::Ktp), 1500.0, 1700.0, 2.0);
  const auto& circular = curves[1];
  REQUIRE(!circular.degeneracy_crossings.empty());
  const double ldeg = circular.degeneracy_crossings.front().lambda_s_nm;
  // conventional degenerate: lambda_p = ldeg / 2, both daughters at ldeg
  const JsaOrientation o =
      jsa_orientation(ktp, config.spdc_pump, config.spdc_signal, config.spdc_idler, ldeg / 2.0,
                      ldeg, ldeg);
  CHECK(!o.vertical);
  CHECK(o.slope == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("orientation reports the vertical flag when k_i' matches k_p'") {
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  // locate the vertical GVM point on the degeneracy diagonal and evaluate
  // the slope there
  const auto curves = trace_gvm_curves(ktp, conventional_type2(Crystal::Ktp), 1200.0, 1500.0, 2.0);
  const auto& vertical = curves[0];
  if (!vertical.degeneracy_crossings.empty()) {
    const double l = vertical.degeneracy_crossings.front().lambda_s_nm;
    const JsaOrientation o = jsa_orientation(ktp, Axis::Y, Axis::Y, Axis::Z, l / 2.0, l, l);
    // at the crossing the denominator passes through zero: either flagged
    // vertical or an enormous slope magnitude
    CHECK((o.vertical || std::abs(o.slope) > 50.0));
  }
}

TEST_CASE("energy conservation precondition on orientation") {
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  CHECK_THROWS_AS(jsa_orientation(ktp, Axis::Y, Axis::Y, Axis::Z, 775.0, 1400.0, 1550.0), Error);
}

TEST_CASE("GVM curves: residual postcondition and KTP landmark") {
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  const auto curves = trace_gvm_curves(ktp, conventional_type2(Crystal::Ktp), 1450.0, 1700.0, 5.0);
  REQUIRE(curves.size() == 3);

  const auto& circular = curves[1];
  CHECK(circular.condition == GvmCondition::Circular);
  REQUIRE(!circular.points.empty());

  // every traced point satisfies its defining condition
  for (const auto& p : circular.points) {
    const double kp = ktp.inverse_group_velocity(Axis::Y, p.lambda_p_nm);
    const double mean = 0.5 * (ktp.inverse_group_velocity(Axis::Y, p.lambda_s_nm) +
                               ktp.inverse_group_velocity(Axis::Z, p.lambda_i_nm));
    CHECK(std::abs(kp - mean) < 1e-6);
  }

  REQUIRE(!circular.degeneracy_crossings.empty());
  const double star = circular.degeneracy_crossings.front().lambda_s_nm;
  CHECK(star > 1500.0);
  CHECK(star < 1600.0);
}

TEST_CASE("LN symmetric-matching landmark in the mid-infrared") {
  const auto& ln = CrystalDispersion::get(Crystal::Ln);
  const auto curves = trace_gvm_curves(ln, conventional_type2(Crystal::Ln), 3200.0, 3800.0, 10.0);
  const auto& circular = curves[1];
  REQUIRE(!circular.degeneracy_crossings.empty());
  const double star = circular.degeneracy_crossings.front().lambda_s_nm;
  CHECK(star > 3000.0);
  CHECK(star < 4000.0);
}

TEST_CASE("empty polyline outside any root band") {
  const auto& ktp = CrystalDispersion::get(Crystal::Ktp);
  const auto curves = trace_gvm_curves(ktp, conventional_type2(Crystal::Ktp), 420.0, 430.0, 2.0);
  // no matching locus this deep in the visible for the circular condition
  CHECK(curves[1].points.empty());
}

TEST_SUITE_END();
