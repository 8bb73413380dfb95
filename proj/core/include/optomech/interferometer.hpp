#pragma once

#include <vector>

#include "optomech/dynamics.hpp"
#include "optomech/sweep_table.hpp"

namespace optomech {

/// Unnormalized mirror states conditioned on detection, one per arm. psi_b is
/// the beta -> 0 image of psi_a produced by the identical quadrature, so the
/// two stay bitwise-proportional in the decoupled limit.
struct ArmStates {
  FockVector psi_a;
  FockVector psi_b;
};

ArmStates arm_states(double t, const PhotonWaveform& wf, const SystemParams& p,
                     const FockVector& phi0);

/// Photodetection probability density at the output port for detuning phi:
/// (||A||^2 + ||B||^2 + 2 Re e^{i phi} <A|B>) / 4.
double probability_density(double t, double phi, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0);

struct PExtrema {
  double p_max;
  double p_min;
};

/// Extrema of the probability density over the detuning phase.
PExtrema p_extrema(double t, const PhotonWaveform& wf, const SystemParams& p,
                   const FockVector& phi0);

/// Instantaneous fringe visibility 2|<A|B>| / (||A||^2 + ||B||^2), in [0, 1].
double visibility(double t, const PhotonWaveform& wf, const SystemParams& p,
                  const FockVector& phi0);

/// Rows (tau, p_max, p_min, v) on the given grid. A uniform ascending grid is
/// evaluated in a single cumulative pass; arbitrary grids fall back to
/// per-point evaluation.
SweepTable visibility_series(const PhotonWaveform& wf, const SystemParams& p,
                             const FockVector& phi0, const std::vector<double>& tau_grid);

/// Default figure grid: tau in [0, 4 pi], step pi/200.
std::vector<double> default_tau_grid();

}  // namespace optomech
