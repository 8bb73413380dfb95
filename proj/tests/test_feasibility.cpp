#include <cmath>
#include <random>

#include <doctest.h>

#include "optomech/feasibility.hpp"

using namespace optomech;

namespace {

PhysicalParams reference_point() {
  PhysicalParams p;
  p.wavelength = 1064e-9;
  p.cavity_length = 1e-2;
  p.mirror_mass = 1e-12;
  p.mech_freq = 2.0 * M_PI * 1e3;
  p.finesse = M_PI * 1e7;
  p.quality = 1e7;
  p.temperature = 1e-3;
  p.transmissivity = 2e-7;
  return p;
}

}  // namespace

TEST_CASE("dimensionless coupling scaling laws") {
  const PhysicalParams base = reference_point();
  const double beta0 = derive_dimensionless(base).beta;

  PhysicalParams heavier = base;
  heavier.mirror_mass *= 2.0;
  CHECK(derive_dimensionless(heavier).beta ==
        doctest::Approx(beta0 / std::sqrt(2.0)).epsilon(1e-13));

  PhysicalParams longer = base;
  longer.cavity_length *= 2.0;
  CHECK(derive_dimensionless(longer).beta == doctest::Approx(beta0 / 2.0).epsilon(1e-13));
}

TEST_CASE("reference point values frozen from direct arithmetic") {
  const SystemParams sp = derive_dimensionless(reference_point());
  CHECK(sp.beta == doctest::Approx(2.5811439365699189).epsilon(1e-12));
  // gamma = T c / (2 L) = 2e-7 * c / 0.02 rad/s, over omega_m.
  const double gamma_rad = 2e-7 * constants::kSpeedOfLight / 0.02;
  CHECK(sp.gamma == doctest::Approx(gamma_rad / (2.0 * M_PI * 1e3)).epsilon(1e-12));
  CHECK(sp.gamma == doctest::Approx(0.47713451592369420).epsilon(1e-12));
}

TEST_CASE("requirements report") {
  SUBCASE("the full reference point passes everything") {
    const FeasibilityReport rep = requirements_report(reference_point());
    CHECK(rep.strong_kick.passed);
    CHECK(rep.narrow_cavity.passed);
    CHECK(rep.nonlinear_range.passed);
    CHECK(rep.low_thermal_rate.passed);
    CHECK(rep.all_passed());
    CHECK(rep.nonlinear_range.lhs ==
          doctest::Approx(1064e-9 / (M_PI * 1e7)).epsilon(1e-12));
    CHECK(rep.nonlinear_range.rhs ==
          doctest::Approx(std::sqrt(constants::kHbar / (2e-12 * 2.0 * M_PI * 1e3)))
              .epsilon(1e-12));
    CHECK(rep.low_thermal_rate.rhs ==
          doctest::Approx(constants::kBoltzmann * 1e-3 /
                          (constants::kHbar * 2.0 * M_PI * 1e3))
              .epsilon(1e-12));
  }

  SUBCASE("gamma = omega_m fails the strict bandwidth requirement") {
    PhysicalParams p = reference_point();
    // Pick T so that gamma lands exactly on omega_m.
    p.transmissivity = 2.0 * p.cavity_length * p.mech_freq / constants::kSpeedOfLight;
    const FeasibilityReport rep = requirements_report(p);
    CHECK(rep.narrow_cavity.lhs == doctest::Approx(rep.narrow_cavity.rhs).epsilon(1e-14));
    CHECK_FALSE(rep.narrow_cavity.passed);
  }

  SUBCASE("cold environments pass the thermal requirement for any Q") {
    PhysicalParams p = reference_point();
    p.temperature = 1e-25;
    p.quality = 1e-6 + 1.0;  // validation wants > 0
    CHECK(requirements_report(p).low_thermal_rate.passed);
  }

  SUBCASE("json serialization carries every requirement") {
    const std::string js = requirements_report(reference_point()).to_json();
    for (const char* key : {"\"beta\"", "\"gamma_over_omega\"", "\"strong_kick\"",
                            "\"narrow_cavity\"", "\"nonlinear_range\"", "\"low_thermal_rate\"",
                            "\"all_passed\": true", "\"margin\""})
      CHECK(js.find(key) != std::string::npos);
  }
}

TEST_CASE("requirement consistency on random samples") {
  // With the finesse tied to the transmissivity (F = 2 pi / T), the exact
  // identity lambda/F = (2 gamma / (beta omega_m)) sqrt(hbar/(2 m omega_m))
  // holds, and passing the first two requirements bounds lambda/F by twice
  // the zero-point width. Violations indicate a units bug.
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    PhysicalParams p;
    p.wavelength = std::pow(10.0, -7.0 + u(rng) * 1.5);
    p.cavity_length = std::pow(10.0, -3.0 + u(rng) * 2.0);
    p.mirror_mass = std::pow(10.0, -13.0 + u(rng) * 3.0);
    p.mech_freq = 2.0 * M_PI * std::pow(10.0, 2.0 + u(rng) * 3.0);
    p.transmissivity = std::pow(10.0, -8.0 + u(rng) * 3.0);
    p.finesse = 2.0 * M_PI / p.transmissivity;
    p.quality = 1e6;
    p.temperature = 0.1;

    const FeasibilityReport rep = requirements_report(p);
    const double zero_point = std::sqrt(constants::kHbar / (2.0 * p.mirror_mass * p.mech_freq));
    const double lhs = p.wavelength / p.finesse;
    CHECK(lhs == doctest::Approx(2.0 * rep.gamma_over_omega / rep.beta * zero_point)
                     .epsilon(1e-12));
    if (rep.strong_kick.passed && rep.narrow_cavity.passed) {
      ++checked;
      CHECK(lhs < 2.0 * zero_point);
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("physical parameter validation") {
  PhysicalParams p = reference_point();
  p.transmissivity = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = reference_point();
  p.mirror_mass = 0.0;
  CHECK_THROWS_AS(derive_dimensionless(p), std::invalid_argument);
}
