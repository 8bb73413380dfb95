#pragma once

#include <string>

#include "optomech/dynamics.hpp"

namespace optomech {

/// Laboratory description of the movable-mirror cavity, SI units throughout.
struct PhysicalParams {
  double wavelength = 0.0;      // m
  double cavity_length = 0.0;   // m
  double mirror_mass = 0.0;     // kg
  double mech_freq = 0.0;       // rad/s
  double finesse = 0.0;
  double quality = 0.0;
  double temperature = 0.0;     // K
  double transmissivity = 0.0;  // power transmissivity of the front mirror

  void validate() const;
};

/// Dimensionless coupling and bandwidth from laboratory parameters:
/// beta = hbar omega_0 / (L omega_m sqrt(2 hbar m omega_m)), gamma = T c / 2L.
/// The photon width defaults to the cavity bandwidth.
SystemParams derive_dimensionless(const PhysicalParams& p);

struct Requirement {
  std::string name;
  std::string relation;  // "lhs < rhs" or "lhs > rhs"
  double lhs = 0.0;      // SI value of the left side
  double rhs = 0.0;      // SI value of the right side
  bool passed = false;
  double margin = 0.0;  // factor by which the inequality holds (> 1 passes)
};

/// The three experimental requirements plus the combined nonlinearity
/// inequality they imply.
struct FeasibilityReport {
  double beta = 0.0;
  double gamma_over_omega = 0.0;
  Requirement strong_kick;       // beta >= 1
  Requirement narrow_cavity;     // gamma < omega_m
  Requirement nonlinear_range;   // lambda / finesse < sqrt(hbar / (2 m omega_m))
  Requirement low_thermal_rate;  // Q > k_B T / (hbar omega_m)

  bool all_passed() const;
  std::string to_json() const;
};

FeasibilityReport requirements_report(const PhysicalParams& p);

namespace constants {
// CODATA 2018. c and k_B are exact; hbar derives from the exact h.
inline constexpr double kSpeedOfLight = 299792458.0;         // m/s
inline constexpr double kHbar = 1.05457181765e-34;           // J s
inline constexpr double kBoltzmann = 1.380649e-23;           // J/K
}  // namespace constants

}  // namespace optomech
