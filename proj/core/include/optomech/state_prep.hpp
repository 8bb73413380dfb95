#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "optomech/dynamics.hpp"

namespace optomech {

/// Target mirror state sum_n c_n D(beta)|n> over the displaced Fock basis.
struct TargetState {
  std::vector<Complex> coeffs;
  double beta = 0.0;

  void validate() const;
  // Modulation coefficients c~_n = c_n / <-beta|n>; these must stay finite,
  // which requires c_n to decay faster than beta^n / sqrt(n!).
  std::vector<Complex> modulation_coeffs() const;
};

/// Arrival-time window and success statistics for one preparation attempt.
struct PrepReport {
  double window_delta_tau = 0.0;
  double success_probability = 0.0;
  double achieved_overlap = 0.0;  // guaranteed floor 1 - epsilon
  double normalization_z = 0.0;
};

/// <-beta|n> = (-beta)^n e^{-beta^2/2} / sqrt(n!)
double displaced_vacuum_overlap(int n, double beta);

/// Ingoing envelope whose dark-port conditional state at tau = 2 pi is the
/// displaced Fock state D(beta)|n>.
PhotonWaveform fock_prep_waveform(int n, double beta, double gamma);

struct ConditionalResult {
  FockVector state;         // unnormalized
  double squared_norm = 0;  // detection-probability density at t
};

/// Dark-port conditional mirror state given photon detection at time t. The
/// prompt reflections of the two arms cancel; only the cavity tail remains.
ConditionalResult conditional_state(double t, const PhotonWaveform& wf, const SystemParams& p,
                                    const FockVector& phi0);

/// ∫_0^upper e^{-i n phi} |-beta e^{i phi}> dphi by quadrature. Over the full
/// circle this projects onto |n> with amplitude 2 pi <n|-beta>.
FockVector circle_integral(int n, double beta, double upper_phi, const TruncationPolicy& policy);

/// Allowed photon-arrival offset |tau - 2 pi| keeping target overlap >= 1 - epsilon.
double fidelity_window_fock(int n, double beta, double epsilon);

struct SuccessProbability {
  double value = 0.0;
  // The window expansion is second order; values above 1 flag its breakdown
  // at small beta rather than a real probability.
  bool exceeds_unity = false;
};

/// Success probability for preparing D(beta)|n> at the given cavity bandwidth.
SuccessProbability success_probability_fock(int n, double beta, double epsilon,
                                            double gamma_over_omega);

/// Modulated envelope preparing an arbitrary displaced-Fock superposition,
/// together with its normalization Z. The unit L2 norm is verified
/// numerically.
std::pair<PhotonWaveform, double> arbitrary_prep_waveform(const TargetState& target, double gamma);

/// Window and success probability for a generic target, with the bandwidth
/// fixed at its optimum gamma/omega_m = 3/(2 pi).
PrepReport success_probability_state(const TargetState& target, double epsilon);

struct OptimizerConfig {
  int random_starts = 32;
  int max_evals_per_start = 2000;
  double rel_ftol = 1e-6;
  std::uint64_t seed = 20250811;
  // Deterministic starts at the basis states and simple two-state mixes,
  // added on top of the random set.
  bool canonical_starts = true;
  // Additional caller-provided starts (e.g. the minimizer of a smaller
  // subspace when scanning nested spaces).
  std::vector<std::vector<Complex>> extra_starts;
};

struct SubspaceMin {
  double value = 0.0;
  std::vector<Complex> coeffs;  // attaining target, first nonzero entry real >= 0
  int start_index = -1;
};

/// Worst-case success probability over the unit sphere of
/// span{D(beta)|0>, ..., D(beta)|j>}: multi-start Nelder-Mead with the global
/// phase removed by keeping the leading coefficient real.
SubspaceMin min_success_over_subspace(int j, double beta, double epsilon,
                                      const OptimizerConfig& cfg = {});

}  // namespace optomech
