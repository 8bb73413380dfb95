#include "optomech/feasibility.hpp"

#include <cmath>

#include "optomech/sweep_table.hpp"

namespace optomech {

void PhysicalParams::validate() const {
  auto positive = [](double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0))
      throw std::invalid_argument(std::string("PhysicalParams: ") + what + " must be positive");
  };
  positive(wavelength, "wavelength");
  positive(cavity_length, "cavity_length");
  positive(mirror_mass, "mirror_mass");
  positive(mech_freq, "mech_freq");
  positive(finesse, "finesse");
  positive(quality, "quality");
  positive(temperature, "temperature");
  if (!(transmissivity > 0.0) || !(transmissivity < 1.0))
    throw std::invalid_argument("PhysicalParams: transmissivity must lie in (0, 1)");
}

SystemParams derive_dimensionless(const PhysicalParams& p) {
  p.validate();
  using namespace constants;
  const double omega0 = 2.0 * M_PI * kSpeedOfLight / p.wavelength;
  const double beta = kHbar * omega0 /
                      (p.cavity_length * p.mech_freq *
                       std::sqrt(2.0 * kHbar * p.mirror_mass * p.mech_freq));
  const double gamma = p.transmissivity * kSpeedOfLight / (2.0 * p.cavity_length) / p.mech_freq;
  return SystemParams::make(beta, gamma, gamma, 0.0);
}

namespace {

Requirement make_req(std::string name, std::string relation, double lhs, double rhs, bool less) {
  Requirement r;
  r.name = std::move(name);
  r.relation = std::move(relation);
  r.lhs = lhs;
  r.rhs = rhs;
  r.passed = less ? (lhs < rhs) : (lhs > rhs);
  r.margin = less ? rhs / lhs : lhs / rhs;
  return r;
}

void json_req(std::string& out, const Requirement& r, bool last = false) {
  out += "  \"" + r.name + "\": {\"relation\": \"" + r.relation + "\", \"lhs\": " +
         format_double(r.lhs) + ", \"rhs\": " + format_double(r.rhs) +
         ", \"passed\": " + (r.passed ? "true" : "false") +
         ", \"margin\": " + format_double(r.margin) + "}";
  out += last ? "\n" : ",\n";
}

}  // namespace

bool FeasibilityReport::all_passed() const {
  return strong_kick.passed && narrow_cavity.passed && low_thermal_rate.passed;
}

std::string FeasibilityReport::to_json() const {
  std::string out = "{\n";
  out += "  \"beta\": " + format_double(beta) + ",\n";
  out += "  \"gamma_over_omega\": " + format_double(gamma_over_omega) + ",\n";
  json_req(out, strong_kick);
  json_req(out, narrow_cavity);
  json_req(out, nonlinear_range);
  json_req(out, low_thermal_rate);
  out += "  \"all_passed\": ";
  out += all_passed() ? "true" : "false";
  out += "\n}\n";
  return out;
}

FeasibilityReport requirements_report(const PhysicalParams& p) {
  using namespace constants;
  const SystemParams dimensionless = derive_dimensionless(p);

  FeasibilityReport rep;
  rep.beta = dimensionless.beta;
  rep.gamma_over_omega = dimensionless.gamma;

  const double gamma_rad = dimensionless.gamma * p.mech_freq;
  const double zero_point = std::sqrt(kHbar / (2.0 * p.mirror_mass * p.mech_freq));
  rep.strong_kick = make_req("strong_kick", "beta >= 1", rep.beta, 1.0, false);
  // beta = 1 exactly still counts as passing the (non-strict) first requirement.
  if (rep.beta == 1.0) rep.strong_kick.passed = true;
  rep.narrow_cavity = make_req("narrow_cavity", "gamma < omega_m", gamma_rad, p.mech_freq, true);
  rep.nonlinear_range = make_req("nonlinear_range", "lambda/finesse < sqrt(hbar/(2 m omega_m))",
                                 p.wavelength / p.finesse, zero_point, true);
  rep.low_thermal_rate =
      make_req("low_thermal_rate", "Q > k_B T / (hbar omega_m)", p.quality,
               kBoltzmann * p.temperature / (kHbar * p.mech_freq), false);
  return rep;
}

}  // namespace optomech
